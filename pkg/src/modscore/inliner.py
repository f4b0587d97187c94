"""De-modularization: replace every call to a unit-defined function with
that function's body, then remove the definitions.

The transform is behavior-preserving or loudly rejected, never silently
wrong. Mechanics:

  - call sites are normalized first: a call buried in a larger expression
    is hoisted into a fresh temp assignment, in evaluation order, and only
    when everything evaluated before it is effect-free;
  - parameters become assignments of the argument expressions, one per
    written argument (so each argument is evaluated exactly once, in call
    order); unsupplied parameters read from hoisted default temps that
    were evaluated once at the definition site;
  - inlined locals are alpha-renamed with fresh ``__inl<N>`` suffixes;
  - a body whose single return is its last statement becomes an
    assignment to a fresh result variable; early returns set the result
    plus a fresh completion flag that guards the remainder of the body
    (inside loops the flag also breaks out).

Rejected outright: recursion, any non-call use of a function name,
rebinding or shadowing of one, decorated/generator/async definitions,
*args/**kwargs, ``nonlocal``, classes with methods (methods are modules
but only dynamically invocable), call sites in deferred or repeated
positions (lambda bodies, comprehensions, while-tests, short-circuit
operands, ternary arms), and hoists that would run a call ahead of an
effectful expression.
"""

from __future__ import annotations

import ast
import copy
from dataclasses import dataclass

from .errors import (
    DynamicCallUnsupported,
    ExternalNameCollision,
    RecursionUnsupported,
    TransformUnsupported,
)
from .parsing import FunctionDef, SourceUnit, parse
from .sandbox import RunLimits, run_solution

HEADER_COMMENT = (
    "# de-modularized output: every helper was inlined at its call sites;"
    " fresh identifiers carry the __inl<N> suffix"
)

# builtins treated as effect-free when deciding whether a call can be
# hoisted past them; dropped from the set if the unit rebinds the name
PURE_BUILTINS = frozenset({
    "abs", "all", "any", "bool", "chr", "dict", "divmod", "enumerate",
    "filter", "float", "frozenset", "hash", "int", "isinstance",
    "issubclass", "len", "list", "map", "max", "min", "ord", "pow",
    "range", "repr", "reversed", "round", "set", "sorted", "str", "sum",
    "tuple", "type", "zip",
})

_DEF_NODES = (ast.FunctionDef, ast.AsyncFunctionDef)


@dataclass(eq=False)
class InlinePlan:
    order: list[FunctionDef]  # callees before callers
    call_sites: dict[FunctionDef, list[tuple[int, int]]]
    fresh_name_seed: int = 0


# ---------------------------------------------------------------------------
# scope helpers


def _collect_locals(node) -> set[str]:
    """Names bound in a def's own scope; nested def bodies excluded."""
    bound: set[str] = set()
    skipped: set[str] = set()

    def walk(n):
        if isinstance(n, _DEF_NODES):
            bound.add(n.name)
            return
        if isinstance(n, ast.ClassDef):
            bound.add(n.name)
            return
        if isinstance(n, ast.Name) and isinstance(n.ctx, (ast.Store, ast.Del)):
            bound.add(n.id)
        elif isinstance(n, (ast.Global, ast.Nonlocal)):
            skipped.update(n.names)
        elif isinstance(n, ast.ExceptHandler) and n.name:
            bound.add(n.name)
        elif isinstance(n, ast.alias):
            bound.add(n.asname or n.name.split(".")[0])
        for child in ast.iter_child_nodes(n):
            walk(child)

    args = node.args
    for a in args.posonlyargs + args.args + args.kwonlyargs:
        bound.add(a.arg)
    for stmt in node.body:
        walk(stmt)
    return bound - skipped


def _collect_free(node, local_names: set[str]) -> set[str]:
    """Identifiers the body resolves outside its own scope."""
    seen: set[str] = set()

    def walk(n):
        if isinstance(n, _DEF_NODES):
            return
        if isinstance(n, ast.Name):
            seen.add(n.id)
        if isinstance(n, (ast.Global, ast.Nonlocal)):
            seen.update(n.names)
        for child in ast.iter_child_nodes(n):
            walk(child)

    for stmt in node.body:
        walk(stmt)
    return seen - local_names


def _all_identifiers(tree) -> set[str]:
    names: set[str] = set()
    for n in ast.walk(tree):
        if isinstance(n, ast.Name):
            names.add(n.id)
        elif isinstance(n, ast.arg):
            names.add(n.arg)
        elif isinstance(n, _DEF_NODES + (ast.ClassDef,)):
            names.add(n.name)
        elif isinstance(n, ast.alias):
            names.add(n.asname or n.name.split(".")[0])
        elif isinstance(n, ast.ExceptHandler) and n.name:
            names.add(n.name)
    return names


def _stored_names(tree) -> set[str]:
    stored: set[str] = set()
    for n in ast.walk(tree):
        if isinstance(n, ast.Name) and isinstance(n.ctx, (ast.Store, ast.Del)):
            stored.add(n.id)
        elif isinstance(n, ast.arg):
            stored.add(n.arg)
        elif isinstance(n, _DEF_NODES + (ast.ClassDef,)):
            stored.add(n.name)
        elif isinstance(n, ast.alias):
            stored.add(n.asname or n.name.split(".")[0])
    return stored


class _FreshNames:
    def __init__(self, taken: set[str], seed: int = 0):
        self.taken = set(taken)
        self.counter = seed

    def make(self, base: str) -> str:
        while True:
            name = f"{base}__inl{self.counter}"
            self.counter += 1
            if name not in self.taken:
                self.taken.add(name)
                return name


# ---------------------------------------------------------------------------
# plan


@dataclass(eq=False)
class _Analysis:
    planned: dict[str, ast.AST]  # name -> def node (in the analyzed tree)
    order: list[str]  # callee-first
    sites: dict[str, list[ast.Call]]
    site_owners: dict[int, list[str]]  # id(call) -> enclosing planned defs
    locals_of: dict[str, set[str]]
    effective_free: dict[str, set[str]]


def _analyze(tree: ast.Module) -> _Analysis:
    defs: dict[str, ast.AST] = {}
    for node in ast.walk(tree):
        if isinstance(node, _DEF_NODES):
            if node.name in defs:
                raise DynamicCallUnsupported(
                    f"function name {node.name!r} is defined more than once"
                )
            defs[node.name] = node
    planned = set(defs)

    for name in planned:
        node = defs[name]
        for n in ast.walk(node):
            if n is not node and isinstance(n, _DEF_NODES) and n.name == name:
                raise DynamicCallUnsupported(f"{name!r} redefined in a nested scope")

    sites: dict[str, list[ast.Call]] = {name: [] for name in planned}
    site_owners: dict[int, list[str]] = {}
    parent_def: dict[str, str | None] = {}

    def scan(node, stack: list[str], call_func_of: ast.Call | None):
        if isinstance(node, _DEF_NODES):
            parent_def[node.name] = stack[-1] if stack else None
            stack = stack + [node.name]
            for child in ast.iter_child_nodes(node):
                scan(child, stack, None)
            return
        if isinstance(node, ast.Name) and node.id in planned:
            if isinstance(node.ctx, (ast.Store, ast.Del)):
                raise DynamicCallUnsupported(
                    f"function name {node.id!r} is rebound (shadowing)"
                )
            if call_func_of is None:
                raise DynamicCallUnsupported(
                    f"function {node.id!r} is used as a value, not called"
                )
            sites[node.id].append(call_func_of)
            site_owners[id(call_func_of)] = list(stack)
            return
        if isinstance(node, (ast.arg,)) and node.arg in planned:
            raise DynamicCallUnsupported(
                f"parameter shadows function name {node.arg!r}"
            )
        if isinstance(node, ast.alias):
            bound = node.asname or node.name.split(".")[0]
            if bound in planned:
                raise DynamicCallUnsupported(
                    f"import rebinds function name {bound!r}"
                )
            return
        if isinstance(node, ast.ExceptHandler) and node.name in planned:
            raise DynamicCallUnsupported(
                f"except clause rebinds function name {node.name!r}"
            )
        if isinstance(node, (ast.Global, ast.Nonlocal)):
            hit = planned.intersection(node.names)
            if hit:
                raise DynamicCallUnsupported(
                    f"global/nonlocal declaration of function name {sorted(hit)[0]!r}"
                )
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
            scan(node.func, stack, node)
            for child in ast.iter_child_nodes(node):
                if child is not node.func:
                    scan(child, stack, None)
            return
        for child in ast.iter_child_nodes(node):
            scan(child, stack, None)

    for stmt in tree.body:
        scan(stmt, [], None)

    # visibility: a nested definition may only be called from inside the
    # function that defines it
    for name in planned:
        parent = parent_def.get(name)
        if parent is None:
            continue
        for call in sites[name]:
            if parent not in site_owners[id(call)]:
                raise DynamicCallUnsupported(
                    f"{name!r} is called outside the scope that defines it"
                )

    # call graph: owner -> callee, cycle check, callee-first order
    calls_of: dict[str, set[str]] = {name: set() for name in planned}
    for name in planned:
        for call in sites[name]:
            owners = site_owners[id(call)]
            if owners:
                calls_of[owners[-1]].add(name)

    # cycle check and callee-first topological order in one DFS
    state: dict[str, int] = {}
    trail: list[str] = []
    order: list[str] = []

    def dfs(name: str):
        state[name] = 1
        trail.append(name)
        for callee in sorted(calls_of[name]):
            if state.get(callee) == 1:
                cycle = trail[trail.index(callee):] + [callee]
                raise RecursionUnsupported(cycle)
            if state.get(callee, 0) == 0:
                dfs(callee)
        trail.pop()
        state[name] = 2
        order.append(name)

    for name in sorted(planned):
        if state.get(name, 0) == 0:
            dfs(name)

    locals_of = {name: _collect_locals(defs[name]) for name in planned}
    effective_free: dict[str, set[str]] = {}
    for name in order:
        free = _collect_free(defs[name], locals_of[name]) - planned
        for callee in calls_of[name]:
            free |= effective_free[callee]
        effective_free[name] = free

    for name in planned:
        for call in sites[name]:
            enclosing = site_owners[id(call)]
            caller_locals: set[str] = set()
            for owner in enclosing:
                caller_locals |= locals_of[owner]
            captured = effective_free[name] & caller_locals
            if captured:
                raise ExternalNameCollision(
                    f"inlining {name!r} would capture {sorted(captured)[0]!r} "
                    f"bound in {enclosing[-1]!r}"
                )

    return _Analysis(
        planned=defs,
        order=order,
        sites=sites,
        site_owners=site_owners,
        locals_of=locals_of,
        effective_free=effective_free,
    )


def plan_inlining(unit: SourceUnit) -> InlinePlan:
    """Resolve call sites and order definitions callee-first.

    Raises RecursionUnsupported, DynamicCallUnsupported, or
    ExternalNameCollision when the unit cannot be inlined soundly.
    """
    analysis = _analyze(unit.tree)
    by_node = {id(fn.node): fn for fn in unit.functions}
    order = [by_node[id(analysis.planned[name])] for name in analysis.order]
    call_sites: dict[FunctionDef, list[tuple[int, int]]] = {}
    starts = _line_start_bytes(unit.text)
    for name in analysis.order:
        fn = by_node[id(analysis.planned[name])]
        spans = []
        for call in analysis.sites[name]:
            spans.append(_node_span(call, starts, len(unit.text.encode("utf-8"))))
        call_sites[fn] = spans
    return InlinePlan(order=order, call_sites=call_sites, fresh_name_seed=0)


def _line_start_bytes(text: str) -> list[int]:
    data = text.encode("utf-8")
    starts = [0]
    for i, b in enumerate(data):
        if b == 0x0A:
            starts.append(i + 1)
    return starts


def _node_span(node, starts, total) -> tuple[int, int]:
    begin = starts[node.lineno - 1] + node.col_offset
    end = starts[node.end_lineno - 1] + node.end_col_offset if node.end_lineno else total
    return begin, end


# ---------------------------------------------------------------------------
# transformability checks


def _walk_own(node):
    """Walk a def body without entering nested definitions."""
    stack = list(node.body)
    while stack:
        n = stack.pop()
        if isinstance(n, _DEF_NODES):
            continue
        yield n
        stack.extend(ast.iter_child_nodes(n))


def _check_transformable(tree: ast.Module, planned: dict[str, ast.AST]):
    for node in ast.walk(tree):
        if isinstance(node, ast.ClassDef):
            for n in ast.walk(node):
                if isinstance(n, _DEF_NODES):
                    raise TransformUnsupported(
                        f"class {node.name!r} defines method {n.name!r}; methods "
                        "are only dynamically invocable"
                    )
    for name, node in planned.items():
        if isinstance(node, ast.AsyncFunctionDef):
            raise TransformUnsupported(f"{name!r} is an async function")
        if node.decorator_list:
            raise TransformUnsupported(f"{name!r} is decorated")
        args = node.args
        if args.vararg or args.kwarg:
            raise TransformUnsupported(f"{name!r} takes *args/**kwargs")
        annotations = [a.annotation for a in args.posonlyargs + args.args + args.kwonlyargs]
        annotations.append(node.returns)
        for annotation in annotations:
            if annotation is not None and not isinstance(annotation, (ast.Name, ast.Constant)):
                raise TransformUnsupported(
                    f"{name!r} has a non-trivial annotation"
                )
        for n in _walk_own(node):
            if isinstance(n, (ast.Yield, ast.YieldFrom)):
                raise TransformUnsupported(f"{name!r} is a generator function")
            if isinstance(n, ast.Await):
                raise TransformUnsupported(f"{name!r} awaits")
            if isinstance(n, ast.Nonlocal):
                raise TransformUnsupported(f"{name!r} declares nonlocal")
            if isinstance(n, ast.ClassDef):
                raise TransformUnsupported(
                    f"{name!r} defines class {n.name!r} in its body"
                )


# ---------------------------------------------------------------------------
# phase 1: call-site normalization (hoisting)


class _EvalEvent:
    __slots__ = ("kind", "node", "ctx", "owners")

    def __init__(self, kind, node, ctx, owners):
        self.kind = kind  # "impure" | "call"
        self.node = node
        self.ctx = ctx  # "plain" | "conditional" | "deferred" | "repeated"
        self.owners = owners  # enclosing planned-call nodes, outermost first


def _linearize(expr, ctx, owners, planned, pure_names, events):
    """Append evaluation-order events for one expression."""
    if expr is None:
        return
    if isinstance(expr, ast.BoolOp):
        _linearize(expr.values[0], ctx, owners, planned, pure_names, events)
        for v in expr.values[1:]:
            _linearize(v, _worse(ctx, "conditional"), owners, planned, pure_names, events)
        return
    if isinstance(expr, ast.IfExp):
        _linearize(expr.test, ctx, owners, planned, pure_names, events)
        _linearize(expr.body, _worse(ctx, "conditional"), owners, planned, pure_names, events)
        _linearize(expr.orelse, _worse(ctx, "conditional"), owners, planned, pure_names, events)
        return
    if isinstance(expr, ast.Compare):
        _linearize(expr.left, ctx, owners, planned, pure_names, events)
        for i, comp in enumerate(expr.comparators):
            sub_ctx = ctx if i == 0 else _worse(ctx, "conditional")
            _linearize(comp, sub_ctx, owners, planned, pure_names, events)
        return
    if isinstance(expr, ast.Lambda):
        for d in expr.args.defaults + [d for d in expr.args.kw_defaults if d]:
            _linearize(d, ctx, owners, planned, pure_names, events)
        _linearize(expr.body, _worse(ctx, "deferred"), owners, planned, pure_names, events)
        return
    if isinstance(expr, (ast.ListComp, ast.SetComp, ast.DictComp, ast.GeneratorExp)):
        lazy = isinstance(expr, ast.GeneratorExp)
        inner = _worse(ctx, "deferred" if lazy else "repeated")
        for i, gen in enumerate(expr.generators):
            _linearize(gen.iter, ctx if i == 0 else inner, owners, planned, pure_names, events)
            for cond in gen.ifs:
                _linearize(cond, inner, owners, planned, pure_names, events)
        if isinstance(expr, ast.DictComp):
            _linearize(expr.key, inner, owners, planned, pure_names, events)
            _linearize(expr.value, inner, owners, planned, pure_names, events)
        else:
            _linearize(expr.elt, inner, owners, planned, pure_names, events)
        return
    if isinstance(expr, ast.Call):
        is_planned = isinstance(expr.func, ast.Name) and expr.func.id in planned
        inner_owners = owners + [expr] if is_planned else owners
        _linearize(expr.func, ctx, inner_owners, planned, pure_names, events)
        for a in expr.args:
            _linearize(a, ctx, inner_owners, planned, pure_names, events)
        for kw in expr.keywords:
            _linearize(kw.value, ctx, inner_owners, planned, pure_names, events)
        if is_planned:
            events.append(_EvalEvent("call", expr, ctx, owners))
        elif not (isinstance(expr.func, ast.Name) and expr.func.id in pure_names):
            events.append(_EvalEvent("impure", expr, ctx, owners))
        return
    if isinstance(expr, ast.NamedExpr):
        _linearize(expr.value, ctx, owners, planned, pure_names, events)
        events.append(_EvalEvent("impure", expr, ctx, owners))
        return
    if isinstance(expr, (ast.Yield, ast.YieldFrom, ast.Await)):
        for child in ast.iter_child_nodes(expr):
            if isinstance(child, ast.expr):
                _linearize(child, ctx, owners, planned, pure_names, events)
        events.append(_EvalEvent("impure", expr, ctx, owners))
        return
    for child in ast.iter_child_nodes(expr):
        if isinstance(child, ast.expr):
            _linearize(child, ctx, owners, planned, pure_names, events)


_CTX_RANK = {"plain": 0, "conditional": 1, "repeated": 2, "deferred": 3}


def _worse(a: str, b: str) -> str:
    return a if _CTX_RANK[a] >= _CTX_RANK[b] else b


def _stmt_eval_parts(stmt) -> list[tuple[ast.expr, str]]:
    """(expression, context) pairs in evaluation order for one statement."""
    if isinstance(stmt, ast.Expr):
        return [(stmt.value, "plain")]
    if isinstance(stmt, ast.Assign):
        return [(stmt.value, "plain")] + [(t, "plain") for t in stmt.targets]
    if isinstance(stmt, ast.AugAssign):
        return [(stmt.target, "plain"), (stmt.value, "plain")]
    if isinstance(stmt, ast.AnnAssign):
        parts = []
        if stmt.value is not None:
            parts.append((stmt.value, "plain"))
        parts.append((stmt.annotation, "plain"))
        return parts
    if isinstance(stmt, ast.Return):
        return [(stmt.value, "plain")] if stmt.value is not None else []
    if isinstance(stmt, ast.Delete):
        return [(t, "plain") for t in stmt.targets]
    if isinstance(stmt, ast.If):
        return [(stmt.test, "plain")]
    if isinstance(stmt, ast.While):
        return [(stmt.test, "repeated")]
    if isinstance(stmt, (ast.For, ast.AsyncFor)):
        return [(stmt.iter, "plain"), (stmt.target, "repeated")]
    if isinstance(stmt, (ast.With, ast.AsyncWith)):
        parts = []
        for item in stmt.items:
            parts.append((item.context_expr, "plain"))
            if item.optional_vars is not None:
                parts.append((item.optional_vars, "plain"))
        return parts
    if isinstance(stmt, ast.Raise):
        parts = []
        if stmt.exc is not None:
            parts.append((stmt.exc, "plain"))
        if stmt.cause is not None:
            parts.append((stmt.cause, "plain"))
        return parts
    if isinstance(stmt, ast.Assert):
        parts = [(stmt.test, "plain")]
        if stmt.msg is not None:
            parts.append((stmt.msg, "conditional"))
        return parts
    if isinstance(stmt, ast.Match):
        parts = [(stmt.subject, "plain")]
        for case in stmt.cases:
            for n in ast.walk(case.pattern):
                if isinstance(n, ast.expr):
                    parts.append((n, "repeated"))
            if case.guard is not None:
                parts.append((case.guard, "conditional"))
        return parts
    if isinstance(stmt, ast.ClassDef):
        parts = [(b, "plain") for b in stmt.bases]
        parts += [(k.value, "plain") for k in stmt.keywords]
        parts += [(d, "plain") for d in stmt.decorator_list]
        return parts
    return []


def _canonical_root_call(stmt, planned) -> ast.Call | None:
    """The statement's own call when it is already in splice position."""
    value = None
    if isinstance(stmt, ast.Expr):
        value = stmt.value
    elif isinstance(stmt, ast.Assign) and len(stmt.targets) == 1:
        value = stmt.value
    if (
        isinstance(value, ast.Call)
        and isinstance(value.func, ast.Name)
        and value.func.id in planned
    ):
        return value
    return None


class _CallSwap(ast.NodeTransformer):
    def __init__(self, mapping: dict[int, str]):
        self.mapping = mapping

    def visit_Call(self, node):
        self.generic_visit(node)
        name = self.mapping.get(id(node))
        if name is not None:
            return ast.copy_location(ast.Name(id=name, ctx=ast.Load()), node)
        return node


def _normalize_stmt(stmt, planned, pure_names, fresh, in_class_body):
    """Hoist unit calls out of compound positions; None means keep as is."""
    events: list[_EvalEvent] = []
    for expr, ctx in _stmt_eval_parts(stmt):
        _linearize(expr, ctx, [], planned, pure_names, events)
    calls = [e for e in events if e.kind == "call"]
    if not calls:
        return None
    if in_class_body:
        raise TransformUnsupported(
            "call to a unit function inside a class body"
        )
    root = _canonical_root_call(stmt, planned)
    hoisted = [e for e in calls if e.node is not root]
    for event in calls:
        if event.ctx != "plain":
            raise TransformUnsupported(
                f"call to {event.node.func.id!r} in a {event.ctx} position "
                f"(line {event.node.lineno})"
            )
    if not hoisted:
        return None

    # a hoisted call's final position is its event rank; an expression
    # that stays put runs after every hoist, and one that moves inside an
    # enclosing hoisted call runs at that call's rank -- reject whenever a
    # hoist would jump ahead of an effect it originally followed
    hoisted_ids = {id(e.node) for e in hoisted}
    rank = {id(e.node): i for i, e in enumerate(hoisted)}
    positions: dict[int, int] = {}
    for pos, event in enumerate(events):
        if event.kind == "call" and id(event.node) in hoisted_ids:
            positions[id(event.node)] = pos
    for pos, event in enumerate(events):
        if event.kind != "impure":
            continue
        owner = next(
            (o for o in reversed(event.owners) if id(o) in hoisted_ids), None
        )
        for call_event in hoisted:
            call_pos = positions[id(call_event.node)]
            if call_pos <= pos:
                continue  # call precedes the effect: order preserved
            if owner is call_event.node:
                continue  # effect travels with this call
            if owner is not None and rank[id(owner)] < rank[id(call_event.node)]:
                continue  # effect's carrier hoists first
            raise TransformUnsupported(
                f"cannot hoist call to {call_event.node.func.id!r} past an "
                f"effectful expression (line {stmt.lineno})"
            )

    swap: dict[int, str] = {}
    prelude: list[ast.stmt] = []
    for event in hoisted:
        call_node = event.node
        # inner hoisted calls were already swapped to temp names in place
        pulled = _CallSwap(swap).visit(call_node)
        temp = fresh.make("tmp")
        assign = ast.Assign(
            targets=[ast.Name(id=temp, ctx=ast.Store())], value=pulled
        )
        prelude.append(ast.copy_location(assign, stmt))
        swap[id(call_node)] = temp
    new_stmt = _CallSwap(swap).visit(stmt)
    return prelude + [new_stmt]


# ---------------------------------------------------------------------------
# block rewriting framework


@dataclass(frozen=True)
class _BlockCtx:
    in_class: bool = False
    in_function: bool = False


def _rewrite_blocks(node, fn, ctx: _BlockCtx = _BlockCtx()):
    """Apply fn(stmt, ctx) -> list | None over every statement list."""
    for field_name, value in ast.iter_fields(node):
        if isinstance(value, list) and value and isinstance(value[0], ast.stmt):
            new_list: list[ast.stmt] = []
            for stmt in value:
                replacement = fn(stmt, ctx)
                if replacement is None:
                    new_list.append(stmt)
                else:
                    new_list.extend(replacement)
            if not new_list:
                new_list.append(ast.copy_location(ast.Pass(), node))
            setattr(node, field_name, new_list)
            for stmt in new_list:
                if isinstance(stmt, _DEF_NODES):
                    child_ctx = _BlockCtx(in_class=False, in_function=True)
                elif isinstance(stmt, ast.ClassDef):
                    child_ctx = _BlockCtx(in_class=True, in_function=ctx.in_function)
                else:
                    child_ctx = ctx
                _rewrite_blocks(stmt, fn, child_ctx)
        elif isinstance(value, list):
            for item in value:
                if isinstance(item, ast.AST):
                    _rewrite_blocks(item, fn, ctx)
        elif isinstance(value, ast.AST):
            _rewrite_blocks(value, fn, ctx)


# ---------------------------------------------------------------------------
# default-value hoisting


def _hoist_defaults(tree, planned_names, fresh) -> dict[tuple[str, str], str]:
    """Evaluate defaults once, at the definition site, into fresh temps."""
    temp_of: dict[tuple[str, str], str] = {}

    def visit(stmt, _ctx):
        if not isinstance(stmt, _DEF_NODES) or stmt.name not in planned_names:
            return None
        args = stmt.args
        prelude: list[ast.stmt] = []
        positional = args.posonlyargs + args.args
        for param, default in zip(positional[len(positional) - len(args.defaults):], args.defaults):
            temp = fresh.make(f"{stmt.name}_{param.arg}_default")
            temp_of[(stmt.name, param.arg)] = temp
            assign = ast.Assign(
                targets=[ast.Name(id=temp, ctx=ast.Store())], value=default
            )
            prelude.append(ast.copy_location(assign, stmt))
        for param, default in zip(args.kwonlyargs, args.kw_defaults):
            if default is None:
                continue
            temp = fresh.make(f"{stmt.name}_{param.arg}_default")
            temp_of[(stmt.name, param.arg)] = temp
            assign = ast.Assign(
                targets=[ast.Name(id=temp, ctx=ast.Store())], value=default
            )
            prelude.append(ast.copy_location(assign, stmt))
        if not prelude:
            return None
        args.defaults = [
            ast.Name(id=temp_of[(stmt.name, p.arg)], ctx=ast.Load())
            for p in positional[len(positional) - len(args.defaults):]
        ]
        args.kw_defaults = [
            None if d is None else ast.Name(id=temp_of[(stmt.name, p.arg)], ctx=ast.Load())
            for p, d in zip(args.kwonlyargs, args.kw_defaults)
        ]
        return prelude + [stmt]

    _rewrite_blocks(tree, visit)
    return temp_of


# ---------------------------------------------------------------------------
# renaming and return rewriting


class _Renamer(ast.NodeTransformer):
    def __init__(self, mapping: dict[str, str]):
        self.mapping = mapping

    def visit_Name(self, node):
        new = self.mapping.get(node.id)
        if new is not None:
            return ast.copy_location(ast.Name(id=new, ctx=node.ctx), node)
        return node

    def visit_arg(self, node):
        self.generic_visit(node)
        new = self.mapping.get(node.arg)
        if new is not None:
            node.arg = new
        return node

    def visit_ExceptHandler(self, node):
        self.generic_visit(node)
        if node.name and node.name in self.mapping:
            node.name = self.mapping[node.name]
        return node

    def visit_alias(self, node):
        bound = node.asname or node.name.split(".")[0]
        new = self.mapping.get(bound)
        if new is not None:
            node.asname = new
        return node


def _count_returns(body) -> int:
    count = 0
    stack = list(body)
    while stack:
        n = stack.pop()
        if isinstance(n, _DEF_NODES):
            continue
        if isinstance(n, ast.Return):
            count += 1
        stack.extend(ast.iter_child_nodes(n))
    return count


def _none() -> ast.expr:
    return ast.Constant(value=None)


def _assign(name: str, value: ast.expr, like) -> ast.stmt:
    node = ast.Assign(targets=[ast.Name(id=name, ctx=ast.Store())], value=value)
    return ast.copy_location(node, like)


def _rewrite_returns(body, ret_name: str, done_name: str):
    """Returns (new_body, uses_flag)."""
    total = _count_returns(body)
    if total == 0:
        return list(body), False
    if total == 1 and isinstance(body[-1], ast.Return):
        tail = body[-1]
        value = tail.value if tail.value is not None else _none()
        return list(body[:-1]) + [_assign(ret_name, value, tail)], False

    def rw_block(stmts, in_loop):
        out: list[ast.stmt] = []
        for idx, s in enumerate(stmts):
            if isinstance(s, ast.Return):
                value = s.value if s.value is not None else _none()
                out.append(_assign(ret_name, value, s))
                out.append(_assign(done_name, ast.Constant(value=True), s))
                if in_loop:
                    out.append(ast.copy_location(ast.Break(), s))
                return out, True
            sub, early = rw_stmt(s, in_loop)
            out.extend(sub)
            if early:
                rest = stmts[idx + 1:]
                if in_loop:
                    guard = ast.If(
                        test=ast.Name(id=done_name, ctx=ast.Load()),
                        body=[ast.Break()],
                        orelse=[],
                    )
                    out.append(ast.copy_location(guard, s))
                    if rest:
                        rest_out, _ = rw_block(rest, in_loop)
                        out.extend(rest_out)
                else:
                    if rest:
                        rest_out, _ = rw_block(rest, in_loop)
                        guard = ast.If(
                            test=ast.UnaryOp(
                                op=ast.Not(),
                                operand=ast.Name(id=done_name, ctx=ast.Load()),
                            ),
                            body=rest_out,
                            orelse=[],
                        )
                        out.append(ast.copy_location(guard, s))
                return out, True
        return out, False

    def rw_stmt(s, in_loop):
        if isinstance(s, ast.If):
            body2, e1 = rw_block(s.body, in_loop)
            orelse2, e2 = rw_block(s.orelse, in_loop) if s.orelse else ([], False)
            s.body, s.orelse = body2, orelse2
            return [s], e1 or e2
        if isinstance(s, (ast.While, ast.For, ast.AsyncFor)):
            body2, e1 = rw_block(s.body, True)
            orelse2, e2 = rw_block(s.orelse, in_loop) if s.orelse else ([], False)
            s.body, s.orelse = body2, orelse2
            return [s], e1 or e2
        if isinstance(s, (ast.With, ast.AsyncWith)):
            body2, e1 = rw_block(s.body, in_loop)
            s.body = body2
            return [s], e1
        if isinstance(s, ast.Try):
            e_any = False
            s.body, e = rw_block(s.body, in_loop)
            e_any |= e
            for handler in s.handlers:
                handler.body, e = rw_block(handler.body, in_loop)
                e_any |= e
            if s.orelse:
                s.orelse, e = rw_block(s.orelse, in_loop)
                e_any |= e
            if s.finalbody:
                s.finalbody, e = rw_block(s.finalbody, in_loop)
                e_any |= e
            return [s], e_any
        if isinstance(s, ast.Match):
            e_any = False
            for case in s.cases:
                case.body, e = rw_block(case.body, in_loop)
                e_any |= e
            return [s], e_any
        return [s], False

    new_body, _ = rw_block(list(body), False)
    init = [
        _assign(ret_name, _none(), body[0]),
        _assign(done_name, ast.Constant(value=False), body[0]),
    ]
    return init + new_body, True


# ---------------------------------------------------------------------------
# phase 2: splicing


def _bind_arguments(call: ast.Call, def_node, rename, default_temps, fname):
    """Assignments binding renamed params, one per written argument."""
    args = def_node.args
    positional = args.posonlyargs + args.args
    by_name = {a.arg: a for a in positional + args.kwonlyargs}
    assigns: list[ast.stmt] = []
    bound: set[str] = set()
    for i, value in enumerate(call.args):
        if isinstance(value, ast.Starred):
            raise TransformUnsupported(
                f"call to {fname!r} uses *unpacking (line {call.lineno})"
            )
        if i >= len(positional):
            raise TransformUnsupported(
                f"call to {fname!r} passes too many positional arguments"
            )
        param = positional[i].arg
        assigns.append(_assign(rename[param], value, call))
        bound.add(param)
    for kw in call.keywords:
        if kw.arg is None:
            raise TransformUnsupported(
                f"call to {fname!r} uses **unpacking (line {call.lineno})"
            )
        if kw.arg not in by_name or kw.arg in bound:
            raise TransformUnsupported(
                f"call to {fname!r}: bad keyword argument {kw.arg!r}"
            )
        assigns.append(_assign(rename[kw.arg], kw.value, call))
        bound.add(kw.arg)
    for param in positional + args.kwonlyargs:
        if param.arg in bound:
            continue
        temp = default_temps.get((fname, param.arg))
        if temp is None:
            raise TransformUnsupported(
                f"call to {fname!r}: missing argument {param.arg!r}"
            )
        assigns.append(
            _assign(rename[param.arg], ast.Name(id=temp, ctx=ast.Load()), call)
        )
    return assigns


class _GlobalStripper(ast.NodeTransformer):
    # module scope is the global scope: the declaration is a no-op there,
    # and compile() rejects it after an earlier toplevel assignment
    def visit_Global(self, node):
        return ast.copy_location(ast.Pass(), node)


def _splice_one(stmt, call, def_node, fresh, default_temps, into_function):
    """Expand one canonical call site into a statement list."""
    fname = def_node.name
    local_names = _collect_locals(def_node)
    rename = {name: fresh.make(name) for name in sorted(local_names)}
    parts = _bind_arguments(call, def_node, rename, default_temps, fname)

    body = copy.deepcopy(def_node.body)
    renamer = _Renamer(rename)
    body = [renamer.visit(s) for s in body]
    if not into_function:
        body = [_GlobalStripper().visit(s) for s in body]

    ret_name = fresh.make(f"{fname}_ret")
    done_name = fresh.make(f"{fname}_done")
    new_body, _ = _rewrite_returns(body, ret_name, done_name)
    parts.extend(new_body)

    if isinstance(stmt, ast.Assign):
        had_return = _count_returns(def_node.body) > 0
        value = (
            ast.Name(id=ret_name, ctx=ast.Load()) if had_return else _none()
        )
        result = ast.Assign(targets=stmt.targets, value=value)
        parts.append(ast.copy_location(result, stmt))
    for part in parts:
        ast.fix_missing_locations(part)
    return parts


def _splice_function(tree, def_node, fresh, default_temps):
    fname = def_node.name

    def visit(stmt, ctx):
        if stmt is def_node:
            return []  # definition removed; hoisted defaults already placed
        call = None
        if isinstance(stmt, ast.Expr) and isinstance(stmt.value, ast.Call):
            call = stmt.value
        elif (
            isinstance(stmt, ast.Assign)
            and len(stmt.targets) == 1
            and isinstance(stmt.value, ast.Call)
        ):
            call = stmt.value
        if (
            call is not None
            and isinstance(call.func, ast.Name)
            and call.func.id == fname
        ):
            return _splice_one(
                stmt, call, def_node, fresh, default_temps, ctx.in_function
            )
        return None

    _rewrite_blocks(tree, visit)


# ---------------------------------------------------------------------------
# public operations


def inline_all(unit: SourceUnit, plan: InlinePlan) -> SourceUnit:
    """Produce the de-modularized unit; identity when nothing is planned."""
    if not plan.order:
        return unit
    tree = copy.deepcopy(unit.tree)
    analysis = _analyze(tree)  # same structure as the plan, on our copy
    _check_transformable(tree, analysis.planned)

    fresh = _FreshNames(_all_identifiers(tree), plan.fresh_name_seed)
    pure_names = PURE_BUILTINS - _stored_names(tree)
    default_temps = _hoist_defaults(tree, set(analysis.planned), fresh)

    planned_names = set(analysis.planned)

    def normalize(stmt, ctx):
        return _normalize_stmt(stmt, planned_names, pure_names, fresh, ctx.in_class)

    _rewrite_blocks(tree, normalize)

    for name in analysis.order:
        _splice_function(tree, analysis.planned[name], fresh, default_temps)

    for node in ast.walk(tree):
        if isinstance(node, _DEF_NODES):
            raise TransformUnsupported(
                f"internal: definition {node.name!r} survived inlining"
            )
    ast.fix_missing_locations(tree)
    text = HEADER_COMMENT + "\n" + ast.unparse(tree) + "\n"
    result = parse(text, unit.profile, unit_id=f"{unit.id}:singular")
    if result.function_count != 0:
        raise TransformUnsupported("internal: output still defines functions")
    return result


def singularize(unit: SourceUnit) -> SourceUnit:
    """plan_inlining + inline_all in one step."""
    return inline_all(unit, plan_inlining(unit))


def verify_equivalence(
    original: SourceUnit,
    transformed: SourceUnit,
    tests,
    limits: RunLimits,
    exact: bool = False,
) -> bool:
    """True iff both units produce identical verdicts on every test.

    Sandbox failures propagate as SandboxUnavailable, never as a verdict.
    """
    for test in tests:
        before = run_solution(original.text, test, limits, exact=exact)
        after = run_solution(transformed.text, test, limits, exact=exact)
        if before.verdict != after.verdict:
            return False
    return True
