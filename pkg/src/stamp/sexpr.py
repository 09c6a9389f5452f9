"""S-expression reader and writer for the planner's model files.

Atoms are strings; ``(...)`` nests into Python lists and ``[...]`` reads
as a tuple of floats (a vector literal).  ``;`` starts a comment that
runs to end of line.
"""

from __future__ import annotations

from .errors import ParseError


class Symbol(str):
    """An atom token.  Subclasses ``str`` so callers can compare directly."""

    __slots__ = ("line", "col")

    def __new__(cls, text: str, line: int = 0, col: int = 0):
        obj = super().__new__(cls, text)
        obj.line = line
        obj.col = col
        return obj


def tokenize(text: str):
    """Yield (token, line, col) triples.  Tokens are punctuation or atoms."""
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
        elif ch in " \t\r":
            col += 1
            i += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()[]":
            yield ch, line, col
            col += 1
            i += 1
        else:
            start = i
            start_col = col
            while i < n and text[i] not in " \t\r\n()[];":
                i += 1
                col += 1
            yield text[start:i], line, start_col


def parse_all(text: str) -> list:
    """Parse every top-level form in ``text``."""
    forms = []
    stack = []
    vec_stack = []

    def emit(value):
        if stack:
            stack[-1].append(value)
        else:
            forms.append(value)

    last_line, last_col = 1, 1
    for tok, line, col in tokenize(text):
        last_line, last_col = line, col
        if tok == "(":
            stack.append([])
            vec_stack.append(False)
        elif tok == "[":
            stack.append([])
            vec_stack.append(True)
        elif tok in ")]":
            if not stack:
                raise ParseError("unbalanced closing bracket", line, col)
            closed = stack.pop()
            was_vec = vec_stack.pop()
            if was_vec != (tok == "]"):
                raise ParseError("mismatched bracket type", line, col)
            if was_vec:
                try:
                    closed = tuple(float(x) for x in closed)
                except (TypeError, ValueError):
                    raise ParseError("vector literals may contain only numbers", line, col)
            if stack:
                stack[-1].append(closed)
            else:
                forms.append(closed)
        else:
            emit(Symbol(tok, line, col))
    if stack:
        raise ParseError("unbalanced open bracket", last_line, last_col)
    return forms


def parse_one(text: str):
    forms = parse_all(text)
    if len(forms) != 1:
        raise ParseError(f"expected exactly one form, found {len(forms)}", 1, 1)
    return forms[0]


def format_number(x) -> str:
    """Render a float compactly but exactly (shortest round-trip repr)."""
    r = repr(float(x))
    return r[:-2] if r.endswith(".0") else r


def dumps(form, indent: int = 0, width: int = 78) -> str:
    """Render a nested form.  Lists longer than ``width`` break one item per line."""
    flat = _dumps_flat(form)
    if len(flat) + indent <= width or not isinstance(form, list):
        return flat
    pad = " " * (indent + 2)
    head = _dumps_flat(form[0]) if form else ""
    parts = [dumps(item, indent + 2, width) for item in form[1:]]
    return "(" + head + "\n" + "\n".join(pad + p for p in parts) + ")"


def _dumps_flat(form) -> str:
    if isinstance(form, list):
        return "(" + " ".join(_dumps_flat(x) for x in form) + ")"
    if isinstance(form, tuple):
        return "[" + " ".join(format_number(x) for x in form) + "]"
    return str(form)
