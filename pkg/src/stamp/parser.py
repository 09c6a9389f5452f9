"""Reader and canonical writer for ``.sdom`` domain and ``.sprob`` problem files.

The surface syntax is an s-expression dialect with two departures from the
usual probabilistic planning form: parameter declarations may type a
variable as continuous, ``(?x dim 2)`` or ``(?x traj)``, and effects may be
``(probabilistic p1 e1 ... pn en)`` with exact rational probabilities that
must sum to one.  ``docs/grammar.md`` gives the full grammar.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction

from .abstraction import GeneratorSpec
from .errors import ParseError, SemanticError
from .geometry import WorldModel, polygon, polygon_area
from .model import (
    ActionSchema,
    ArgType,
    ConcreteModel,
    ConcreteState,
    Literal,
    PredicateSchema,
    Universe,
    is_variable,
    sorted_literals,
)
from .sexpr import Symbol, dumps, format_number, parse_one


@dataclass(frozen=True)
class Domain:
    name: str
    predicates: dict = field(hash=False)
    actions: dict = field(hash=False)


def _pos(form):
    if isinstance(form, Symbol):
        return form.line, form.col
    if isinstance(form, list):
        for item in form:
            p = _pos(item)
            if p != (0, 0):
                return p
    return (0, 0)


def _fail(form, message: str):
    line, col = _pos(form)
    raise ParseError(message, line, col)


def _expect_list(form, what: str) -> list:
    if not isinstance(form, list):
        _fail(form, f"expected {what}")
    return form


def _expect_symbol(form, what: str) -> str:
    if not isinstance(form, Symbol):
        _fail(form, f"expected {what}")
    return str(form)


def _parse_param(form) -> tuple[str, ArgType]:
    """``?x`` | ``(?x dim K)`` | ``(?x traj)``"""
    if isinstance(form, Symbol):
        if not form.startswith("?"):
            _fail(form, "parameter names start with ?")
        return str(form), ArgType.object()
    form = _expect_list(form, "parameter declaration")
    if len(form) >= 1 and isinstance(form[0], Symbol) and form[0].startswith("?"):
        name = str(form[0])
        if len(form) == 2 and form[1] == "traj":
            return name, ArgType.traj()
        if len(form) == 3 and form[1] == "dim":
            try:
                return name, ArgType.vector(int(form[2]))
            except (ValueError, SemanticError):
                _fail(form, "dimension must be a positive integer")
    _fail(form, "malformed parameter declaration")


def _parse_number(form) -> Fraction:
    try:
        return Fraction(str(form))
    except (ValueError, ZeroDivisionError):
        _fail(form, f"expected a number, got {form}")


def _parse_literal(form, predicates, params, *, ground: bool) -> Literal:
    form = _expect_list(form, "literal")
    positive = True
    if form and form[0] == "not":
        if len(form) != 2:
            _fail(form, "(not ...) takes one literal")
        positive = False
        form = _expect_list(form[1], "literal")
    if not form:
        _fail(form, "empty literal")
    name = _expect_symbol(form[0], "predicate name")
    if name not in predicates:
        _fail(form, f"undeclared predicate {name}")
    schema = predicates[name]
    raw_args = form[1:]
    if len(raw_args) != len(schema.params):
        _fail(form, f"predicate {name} takes {len(schema.params)} arguments")
    args = []
    for raw, argtype in zip(raw_args, schema.params):
        if isinstance(raw, Symbol):
            term = str(raw)
            if is_variable(term):
                if ground:
                    _fail(raw, f"variable {term} not allowed here")
                if params is not None and term not in params:
                    _fail(raw, f"variable {term} is not an action parameter")
                if params is not None and params[term] != argtype:
                    _fail(raw, f"variable {term} used at incompatible type")
            elif not argtype.is_object:
                _fail(raw, f"predicate {name} expects a continuous value here")
            args.append(term)
        elif isinstance(raw, tuple):
            if argtype.is_object or argtype.trajectory:
                _fail(form, f"predicate {name} does not take a vector here")
            if len(raw) != argtype.dim:
                _fail(form, f"vector of dimension {argtype.dim} expected")
            args.append(raw)
        else:
            _fail(form, "malformed literal argument")
    return Literal(name, tuple(args), positive)


def _parse_condition(form, predicates, params, *, ground: bool) -> tuple[Literal, ...]:
    form = _expect_list(form, "condition")
    if form and form[0] == "and":
        lits = [_parse_literal(f, predicates, params, ground=ground) for f in form[1:]]
    else:
        lits = [_parse_literal(form, predicates, params, ground=ground)]
    return sorted_literals(lits)


def _parse_effect(form, predicates, params):
    form = _expect_list(form, "effect")
    if form and form[0] == "probabilistic":
        body = form[1:]
        if not body or len(body) % 2 != 0:
            _fail(form, "(probabilistic ...) takes probability/effect pairs")
        outcomes = []
        for prob_form, eff_form in zip(body[0::2], body[1::2]):
            prob = _parse_number(prob_form)
            effects = _parse_condition(eff_form, predicates, params, ground=False)
            outcomes.append((prob, effects))
        return tuple(outcomes)
    effects = _parse_condition(form, predicates, params, ground=False)
    return ((Fraction(1), effects),)


def parse_domain(text: str) -> Domain:
    form = parse_one(text)
    form = _expect_list(form, "(define ...)")
    if len(form) < 2 or form[0] != "define":
        _fail(form, "domain files start with (define (domain NAME) ...)")
    head = _expect_list(form[1], "(domain NAME)")
    if len(head) != 2 or head[0] != "domain":
        _fail(head, "expected (domain NAME)")
    name = _expect_symbol(head[1], "domain name")

    predicates: dict[str, PredicateSchema] = {}
    actions: dict[str, ActionSchema] = {}
    for section in form[2:]:
        section = _expect_list(section, "domain section")
        if not section:
            _fail(section, "empty domain section")
        tag = section[0]
        if tag == ":predicates":
            for decl in section[1:]:
                decl = _expect_list(decl, "predicate declaration")
                pname = _expect_symbol(decl[0], "predicate name")
                if pname in predicates:
                    raise SemanticError(f"duplicate predicate {pname}")
                types = tuple(_parse_param(p)[1] for p in decl[1:])
                predicates[pname] = PredicateSchema(pname, types)
        elif tag == ":action":
            action = _parse_action(section, predicates)
            if action.name in actions:
                raise SemanticError(f"duplicate action {action.name}")
            actions[action.name] = action
        else:
            _fail(section, f"unknown domain section {tag}")
    return Domain(name, predicates, actions)


def _parse_action(section, predicates) -> ActionSchema:
    name = _expect_symbol(section[1], "action name")
    fields = {}
    rest = section[2:]
    if len(rest) % 2 != 0:
        _fail(section, f"action {name}: keyword sections come in pairs")
    for key, value in zip(rest[0::2], rest[1::2]):
        key = _expect_symbol(key, "action keyword")
        if key in fields:
            _fail(section, f"action {name}: duplicate {key}")
        fields[key] = value
    unknown = set(fields) - {":parameters", ":precondition", ":effect", ":cost"}
    if unknown:
        _fail(section, f"action {name}: unknown section {sorted(unknown)[0]}")
    if ":parameters" not in fields or ":effect" not in fields:
        _fail(section, f"action {name}: :parameters and :effect are required")

    params = tuple(
        _parse_param(p) for p in _expect_list(fields[":parameters"], "parameter list")
    )
    param_types = dict(params)
    if ":precondition" in fields:
        precondition = _parse_condition(
            fields[":precondition"], predicates, param_types, ground=False)
    else:
        precondition = ()
    outcomes = _parse_effect(fields[":effect"], predicates, param_types)
    cost = float(_parse_number(fields[":cost"])) if ":cost" in fields else 1.0
    return ActionSchema(name, params, precondition, outcomes, cost)


# --- problems ------------------------------------------------------------

def _parse_generator(form, domain) -> tuple[tuple[str, str], GeneratorSpec]:
    form = _expect_list(form, "generator declaration")
    if len(form) != 2:
        _fail(form, "generator declarations look like ((action ?param) SPEC)")
    target = _expect_list(form[0], "(action ?param)")
    if len(target) != 2:
        _fail(target, "expected (action ?param)")
    action_name = _expect_symbol(target[0], "action name")
    param = _expect_symbol(target[1], "parameter name")
    if action_name not in domain.actions:
        _fail(target, f"unknown action {action_name}")
    action = domain.actions[action_name]
    if param not in action.param_types or action.param_types[param].is_object:
        _fail(target, f"({action_name} {param}) is not a continuous parameter")

    spec = _expect_list(form[1], "generator spec")
    if not spec:
        _fail(form, "empty generator spec")
    kind = spec[0]
    if kind == ":finite":
        values = tuple(v for v in spec[1:])
        if not values or not all(isinstance(v, tuple) for v in values):
            _fail(spec, "(:finite v1 ... vn) takes vector literals")
        return (action_name, param), GeneratorSpec.finite(values)
    if kind == ":offsets":
        if len(spec) < 3:
            _fail(spec, "(:offsets ?param v1 ... vn)")
        anchor = _expect_symbol(spec[1], "anchor parameter")
        offsets = tuple(spec[2:])
        if not all(isinstance(v, tuple) for v in offsets):
            _fail(spec, "offsets must be vector literals")
        return (action_name, param), GeneratorSpec.offsets(anchor, offsets)
    if kind == ":atoms":
        if len(spec) < 2:
            _fail(spec, "(:atoms pred term*)")
        pred = _expect_symbol(spec[1], "predicate name")
        if pred not in domain.predicates:
            _fail(spec, f"undeclared predicate {pred}")
        terms = tuple(str(t) if isinstance(t, Symbol) else t for t in spec[2:])
        pschema = domain.predicates[pred]
        if len(pschema.params) != len(terms) + 1:
            _fail(spec, f"(:atoms {pred} ...) must fix all arguments but the last")
        if pschema.params[-1].is_object:
            _fail(spec, f"the yielded argument of {pred} is not continuous")
        for t in terms:
            if isinstance(t, str) and is_variable(t) and (
                    t not in action.param_types or not action.param_types[t].is_object):
                _fail(spec, f"{t} is not an object parameter of {action_name}")
        return (action_name, param), GeneratorSpec.atoms(pred, terms)
    if kind == ":region":
        poly_form = _expect_list(spec[1] if len(spec) > 1 else None, "region polygon")
        if not all(isinstance(v, tuple) and len(v) == 2 for v in poly_form):
            _fail(spec, "region polygons are lists of 2d vectors")
        options = spec[2:]
        cap, measure = None, None
        while options:
            if len(options) < 2:
                _fail(spec, "region options come in key value pairs")
            key, value = options[0], options[1]
            if key == "cap":
                cap = int(value)
            elif key == "measure":
                measure = float(_parse_number(value))
            else:
                _fail(spec, f"unknown region option {key}")
            options = options[2:]
        if cap is None or cap < 1:
            _fail(spec, "regions need a positive sample cap")
        return (action_name, param), GeneratorSpec.region(polygon(poly_form), cap, measure)
    if kind == ":motion":
        cap = 5
        options = spec[1:]
        while options:
            if len(options) < 2 or options[0] != "cap":
                _fail(spec, "(:motion cap N)")
            cap = int(options[1])
            options = options[2:]
        if not action.param_types[param].trajectory:
            _fail(target, f"({action_name} {param}) is not a trajectory parameter")
        return (action_name, param), GeneratorSpec.motion(cap)
    _fail(spec, f"unknown generator kind {kind}")


def parse_problem(text: str, domain: Domain, base_dir: str | None = None,
                  world: WorldModel | None = None) -> ConcreteModel:
    form = parse_one(text)
    form = _expect_list(form, "(define ...)")
    if len(form) < 2 or form[0] != "define":
        _fail(form, "problem files start with (define (problem NAME) ...)")
    head = _expect_list(form[1], "(problem NAME)")
    if len(head) != 2 or head[0] != "problem":
        _fail(head, "expected (problem NAME)")
    name = _expect_symbol(head[1], "problem name")

    objects: tuple[str, ...] = ()
    init: tuple[Literal, ...] = ()
    goal: tuple[Literal, ...] = ()
    horizon = 50
    world_path = None
    generators: dict[tuple[str, str], GeneratorSpec] = {}
    seen = set()
    for section in form[2:]:
        section = _expect_list(section, "problem section")
        if not section:
            _fail(section, "empty problem section")
        tag = str(section[0])
        if tag in seen:
            _fail(section, f"duplicate section {tag}")
        seen.add(tag)
        if tag == ":domain":
            declared = _expect_symbol(section[1], "domain name")
            if declared != domain.name:
                raise SemanticError(
                    f"problem {name} is for domain {declared}, not {domain.name}")
        elif tag == ":objects":
            objects = tuple(_expect_symbol(o, "object name") for o in section[1:])
            if len(set(objects)) != len(objects):
                raise SemanticError("duplicate object declaration")
        elif tag == ":init":
            lits = [
                _parse_literal(f, domain.predicates, None, ground=True)
                for f in section[1:]
            ]
            for lit in lits:
                if not lit.positive:
                    _fail(section, "initial states list positive literals only")
            init = sorted_literals(lits)
        elif tag == ":goal":
            goal = _parse_condition(section[1], domain.predicates, None, ground=True)
        elif tag == ":horizon":
            horizon = int(section[1])
        elif tag == ":world":
            world_path = str(section[1]).strip('"')
        elif tag == ":generators":
            for decl in section[1:]:
                key, spec = _parse_generator(decl, domain)
                if key in generators:
                    raise SemanticError(f"duplicate generator for {key}")
                generators[key] = spec
        else:
            _fail(section, f"unknown problem section {tag}")

    object_set = set(objects)
    for lit in init + goal:
        for arg in lit.args:
            if isinstance(arg, str) and arg not in object_set:
                raise SemanticError(f"undeclared object {arg} in {lit}")

    if world is None and world_path is not None:
        full = world_path if base_dir is None else os.path.join(base_dir, world_path)
        world = WorldModel.load(full)

    universe = Universe(tuple(sorted(objects)), dict(domain.predicates))
    initial = ConcreteState(frozenset(init), world)
    return ConcreteModel(
        name=name,
        universe=universe,
        actions=dict(domain.actions),
        initial=initial,
        goal=goal,
        horizon=horizon,
        world=world,
        generators=generators,
    )


def load_model(domain_path: str, problem_path: str,
               world_path: str | None = None) -> tuple[Domain, ConcreteModel]:
    with open(domain_path) as fh:
        domain = parse_domain(fh.read())
    world = WorldModel.load(world_path) if world_path else None
    with open(problem_path) as fh:
        m = parse_problem(fh.read(), domain,
                          base_dir=os.path.dirname(os.path.abspath(problem_path)),
                          world=world)
    return domain, m


# --- canonical printing ---------------------------------------------------

def _format_param(name: str, argtype: ArgType) -> str:
    if argtype.is_object:
        return name
    if argtype.trajectory:
        return f"({name} traj)"
    return f"({name} dim {argtype.dim})"


def _format_literal(lit: Literal) -> str:
    return str(lit)


def _format_condition(lits) -> str:
    if len(lits) == 1:
        return _format_literal(lits[0])
    return "(and " + " ".join(_format_literal(l) for l in lits) + ")"


def _format_effect(outcomes) -> str:
    if len(outcomes) == 1 and outcomes[0][0] == 1:
        effects = outcomes[0][1]
        return "(and " + " ".join(_format_literal(l) for l in effects) + ")"
    parts = []
    for prob, effects in outcomes:
        body = "(and " + " ".join(_format_literal(l) for l in effects) + ")"
        parts.append(f"{prob} {body}")
    return "(probabilistic " + " ".join(parts) + ")"


def print_domain(domain: Domain) -> str:
    lines = [f"(define (domain {domain.name})"]
    lines.append("  (:predicates")
    for pname in sorted(domain.predicates):
        schema = domain.predicates[pname]
        decls = " ".join(
            _format_param(f"?x{i}", t) for i, t in enumerate(schema.params))
        lines.append(f"    ({pname} {decls})" if decls else f"    ({pname})")
    lines.append("  )")
    for aname in sorted(domain.actions):
        a = domain.actions[aname]
        lines.append(f"  (:action {a.name}")
        params = " ".join(_format_param(n, t) for n, t in a.params)
        lines.append(f"    :parameters ({params})")
        if a.precondition:
            lines.append(f"    :precondition {_format_condition(a.precondition)}")
        lines.append(f"    :effect {_format_effect(a.outcomes)}")
        lines.append(f"    :cost {format_number(a.cost)}")
        lines.append("  )")
    lines.append(")")
    return "\n".join(lines) + "\n"


def _format_generator(key, spec: GeneratorSpec) -> str:
    action, param = key
    if spec.kind == "finite":
        body = ":finite " + " ".join(dumps(v) for v in spec.values)
    elif spec.kind == "offsets":
        body = f":offsets {spec.anchor} " + " ".join(dumps(v) for v in spec.values)
    elif spec.kind == "atoms":
        body = f":atoms {spec.pred}"
        if spec.terms:
            body += " " + " ".join(
                t if isinstance(t, str) else dumps(t) for t in spec.terms)
    elif spec.kind == "region":
        poly = "(" + " ".join(dumps(v) for v in spec.poly) + ")"
        body = f":region {poly} cap {spec.cap}"
        if spec.declared_measure is not None:
            body += f" measure {format_number(spec.declared_measure)}"
    elif spec.kind == "motion":
        body = f":motion cap {spec.cap}"
    else:
        raise SemanticError(f"unknown generator kind {spec.kind}")
    return f"(({action} {param}) ({body}))"


def print_problem(model: ConcreteModel, domain_name: str,
                  world_path: str | None = None) -> str:
    lines = [f"(define (problem {model.name})"]
    lines.append(f"  (:domain {domain_name})")
    lines.append("  (:objects " + " ".join(model.universe.objects) + ")")
    lines.append("  (:init")
    for lit in sorted_literals(model.initial.literals):
        lines.append(f"    {lit}")
    lines.append("  )")
    lines.append(f"  (:goal {_format_condition(model.goal)})")
    lines.append(f"  (:horizon {model.horizon})")
    if world_path:
        lines.append(f"  (:world {world_path})")
    if model.generators:
        lines.append("  (:generators")
        for key in sorted(model.generators):
            lines.append("    " + _format_generator(key, model.generators[key]))
        lines.append("  )")
    lines.append(")")
    return "\n".join(lines) + "\n"
