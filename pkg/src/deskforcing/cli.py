"""Command-line entry point: one subcommand per module."""
from __future__ import annotations

import argparse
import json
import os
import random
import sys

from . import cardinal, forcing, logic, modeltools, names, ordinal, proof
from .errors import DomainError, PosetError
from .forcingrel import ForcingEnv, check_ftf, formula_family, forces, semantic_forces
from .hf import format_hf, parse_hf, v_stage


class _Usage(Exception):
    pass


# ------------------------------------------------------------- helpers

def _read_input(args):
    if args.input is None:
        return None
    if args.input == "-":
        return sys.stdin.read()
    with open(args.input, encoding="utf-8") as fh:
        return fh.read()


def _read_json(args, what):
    text = _read_input(args)
    if text is None:
        return None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"{what}: invalid JSON ({exc})") from None


def _formula_arg(args, text):
    """A formula from the positional text, or from --input (text or JSON AST)."""
    if text is not None:
        return logic.parse(text)
    raw = _read_input(args)
    if raw is None:
        raise _Usage("a formula argument or --input is required")
    raw = raw.strip()
    if raw.startswith("{"):
        d = json.loads(raw)
        return logic.from_json(d.get("ast", d))
    return logic.parse(raw)


def _stage(n):
    if not 0 <= n <= 5:
        raise DomainError("stage must be between 0 and 5")
    return logic.Structure.from_hfsets(v_stage(n))


def _structure(args):
    d = _read_json(args, "structure")
    if d is None:
        return _stage(args.stage)
    return logic.Structure.from_json(d.get("structure", d))


def _node(s, text):
    if s.labels:
        try:
            return s.node_for(parse_hf(text))
        except DomainError:
            pass
    for n in s.nodes:
        if str(n) == text:
            return n
    raise DomainError(f"{text!r} is not a node of the structure")


def _node_label(s, n):
    v = s.labels.get(n)
    return format_hf(v, numerals=True) if v is not None else str(n)


def _assignments(items):
    out = {}
    for item in items or ():
        if "=" not in item:
            raise _Usage(f"expected VAR=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _poset(spec):
    """grid:RxC, grid:Rxw, collapse:a,b:x,y,z, a JSON object, or a path to one."""
    s = spec.strip()
    if s.startswith("grid:"):
        r, _, c = s[5:].partition("x")
        try:
            if c in ("w", "omega", "ω"):
                return forcing.InfiniteGrid(int(r))
            return forcing.FiniteGrid(int(r), int(c))
        except ValueError:
            raise PosetError(f"bad grid spec {spec!r}") from None
    if s.startswith("collapse:"):
        parts = s[9:].split(":")
        if len(parts) != 2:
            raise PosetError(f"bad collapse spec {spec!r}")
        return forcing.Collapse([_atom(x) for x in parts[0].split(",")], [_atom(x) for x in parts[1].split(",")])
    if s.startswith("{"):
        d = json.loads(s)
    else:
        with open(s, encoding="utf-8") as fh:
            d = json.load(fh)
    return forcing.poset_from_json(d.get("poset", d))


def _atom(x):
    x = x.strip()
    return int(x) if x.lstrip("-").isdigit() else x


def _condition(text, P):
    t = text.strip()
    if t in ("", "0", "{}", "empty") and isinstance(P, forcing.PartialFunctionPoset):
        return P.bottom
    if t.startswith("{") or t.startswith("["):
        return forcing.Condition.from_json(json.loads(t))
    if isinstance(P, forcing.Explicit) or P.contains(t):
        if not P.contains(t):
            raise PosetError(f"{t!r} is not an element of the poset")
        return t
    # r,c,b;r,c,b
    cells = []
    for part in t.split(";"):
        bits = [int(v) for v in part.split(",")]
        if len(bits) != 3:
            raise PosetError(f"bad cell {part!r}; expected row,col,bit")
        cells.append(bits)
    return forcing.Condition.grid(cells)


def _plabel(p):
    return p.to_json() if hasattr(p, "to_json") else p


def _ptext(p):
    if isinstance(p, forcing.Condition):
        if not p.items:
            return "{}"
        return ";".join(",".join(str(v) for v in (k + (b,) if isinstance(k, tuple) else (k, b))) for k, b in p.items)
    return str(p)


def _emit(args, text, data):
    if args.format == "json":
        sys.stdout.write(json.dumps(data, ensure_ascii=False, sort_keys=False) + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


# --------------------------------------------------------- subcommands

def cmd_parse(args):
    f = _formula_arg(args, args.formula)
    _emit(args, logic.render(f), {"formula": logic.render(f), "ast": logic.to_json(f)})


def cmd_classify(args):
    f = _formula_arg(args, args.formula)
    c = logic.classify(f)
    _emit(args, c, {"formula": logic.render(f), "class": c})


def cmd_relativize(args):
    f = _formula_arg(args, args.formula)
    r = logic.relativize(f, args.restrictor)
    _emit(args, logic.render(r), {"formula": logic.render(r), "ast": logic.to_json(r)})


def cmd_eval(args):
    f = logic.parse(args.formula)
    s = _structure(args)
    a = {k: _node(s, v) for k, v in _assignments(args.assign).items()}
    for k, v in _assignments(args.tag).items():
        a[k] = logic.Tag(frozenset(_node(s, x) for x in v.split("|") if x))
    val = logic.evaluate(f, s, a)
    _emit(args, "true" if val else "false", {"formula": logic.render(f), "value": val})


def cmd_collapse(args):
    d = _read_json(args, "digraph")
    g = modeltools.example_digraph() if d is None else modeltools.MembershipDigraph.from_json(d)
    f = modeltools.mostowski_collapse(g)
    order = list(g.nodes)
    rows = [(g.labels[n], format_hf(f[n], numerals=True)) for n in order]
    text = "\n".join(f"{a} -> {b}" for a, b in rows)
    text += "\nimage: {" + ", ".join(b for _, b in rows) + "}"
    _emit(args, text, {"collapse": {a: b for a, b in rows}, "image": [b for _, b in rows], "digraph": g.to_json()})


def cmd_reflect(args):
    s = _structure(args)
    fs = [logic.parse(t) for t in args.formulas]
    seed = [_node(s, x) for x in (args.seed_nodes or [])]
    rep = modeltools.reflect_closure(fs, s, seed, extensional=args.extensional)
    d = rep.to_json(s)
    lines = ["closure: {" + ", ".join(d["closure"]) + "}"]
    lines += [f"{k}: {'reflects' if v else 'fails'}" for k, v in d["verdicts"].items()]
    if d["collapse"] is not None:
        lines.append("collapse: {" + ", ".join(d["collapse"].values()) + "}")
    lines.append(f"rounds: {d['rounds']}")
    _emit(args, "\n".join(lines), d)


def cmd_ord(args):
    op = args.op
    vals = [ordinal.parse_ordinal(t) for t in args.operands]
    need = {"norm": 1, "cf": 1, "add": 2, "mul": 2, "pow": 2, "cmp": 2}[op]
    if len(vals) != need:
        raise _Usage(f"ord {op} takes {need} operand(s)")
    if op == "norm":
        r = vals[0]
    elif op == "cf":
        r = ordinal.cofinality(vals[0])
    elif op == "add":
        r = ordinal.ord_add(*vals)
    elif op == "mul":
        r = ordinal.ord_mul(*vals)
    elif op == "pow":
        r = ordinal.ord_pow(*vals)
    else:
        c = ordinal.compare(*vals)
        sym = {-1: "<", 0: "=", 1: ">"}[c]
        _emit(args, sym, {"op": op, "result": c})
        return
    out = ordinal.format_ordinal(r)
    _emit(args, out, {"op": op, "result": out})


def cmd_card(args):
    op = args.op
    if op == "koenig":
        n = cardinal.koenig_exhaustive(args.max_len, args.max_entry)
        _emit(args, f"checked {n} cases, no counterexample", {"checked": n, "counterexamples": 0})
        return
    vals = [cardinal.parse_cardinal(t) for t in args.operands]
    if op == "norm":
        if len(vals) != 1:
            raise _Usage("card norm takes one operand")
        out = cardinal.format_cardinal(cardinal.normalize(vals[0], gch=args.gch))
        _emit(args, out, {"op": op, "result": out})
        return
    if len(vals) != 2:
        raise _Usage("card cmp takes two operands")
    c = cardinal.compare(*vals)
    _emit(args, c or "undetermined", {"op": op, "result": c})


def cmd_continuum(args):
    raw = args.index.strip()
    if raw.startswith("aleph(") and raw.endswith(")"):
        raw = raw[6:-1]
    ok, reason = cardinal.continuum_admissible(ordinal.parse_ordinal(raw))
    text = ("admissible: " if ok else "inadmissible: ") + reason
    _emit(args, text, {"index": raw, "admissible": ok, "reason": reason})


def _poset_from_args(args):
    if args.poset is not None:
        return _poset(args.poset)
    d = _read_json(args, "poset")
    if d is None:
        raise _Usage("a poset spec or --input is required")
    return forcing.poset_from_json(d.get("poset", d))


def cmd_poset(args):
    P = _poset_from_args(args)
    d = {"poset": P.to_json(), "describe": P.describe(), "finite": P.finite}
    lines = [P.describe()]
    if P.finite:
        els = P.elements()
        mx = forcing.maximal_elements(P)
        d["size"] = len(els)
        d["maximal"] = [_plabel(m) for m in mx]
        lines.append(f"elements: {len(els)}")
        lines.append(f"maximal: {len(mx)}")
    rep = forcing.separative_and_atoms(P, samples=args.budget, seed=args.seed)
    d["separative"] = rep.separative
    d["atomless"] = rep.atomless
    lines.append(f"separative: {str(rep.separative).lower()}")
    lines.append(f"atomless: {str(rep.atomless).lower()}")
    _emit(args, "\n".join(lines), d)


def _generic_family(rows, cols, grounds):
    fam = [forcing.cell_defined(r, c) for r in range(rows) for c in range(cols)]
    fam += [forcing.rows_differ(a, b) for a in range(rows) for b in range(a + 1, rows)]
    for i, (row, subset) in enumerate(grounds):
        fam.append(forcing.row_differs_from(row, subset, f"ground{i}"))
    return fam


def _grounds(texts, cols, seed):
    if texts:
        out = []
        for t in texts:
            row, _, bits = t.partition(":")
            out.append((int(row), frozenset(int(b) for b in bits.split(",") if b.strip())))
        return out
    rng = random.Random(seed)
    return [(i % 2, frozenset(c for c in range(cols + 2) if rng.random() < 0.5)) for i in range(2)]


def cmd_generic(args):
    P = forcing.InfiniteGrid(args.rows)
    grounds = _grounds(args.ground, args.cols, args.seed)
    fam = _generic_family(args.rows, args.cols, grounds)
    G = forcing.construct_generic(P, fam)
    m = G.union_map()
    window = [[m.get((r, c)) for c in range(args.cols)] for r in range(args.rows)]
    width = max([args.cols] + [c + 1 for (r, c) in m if r < args.rows])
    full = [[m.get((r, c)) for c in range(width)] for r in range(args.rows)]
    met = [D.name for D in fam if forcing.meets(G, D)]
    # cells past the window are shown after a bar: row distinctness is often met there
    lines = []
    for row in full:
        cells = ["." if v is None else str(v) for v in row]
        tail = " | " + " ".join(cells[args.cols:]) if width > args.cols else ""
        lines.append(" ".join(cells[:args.cols]) + tail)
    lines.append(f"dense sets met: {len(met)}/{len(fam)}")
    _emit(args, "\n".join(lines), {
        "rows": args.rows, "cols": args.cols, "window": window, "defined": full, "met": met, "family": [D.name for D in fam],
        "chain": [_plabel(p) for p in G.chain], "grounds": [[r, sorted(s)] for r, s in grounds]})


def _names(args):
    d = _read_json(args, "names")
    if d is None:
        P, table = names.tau_example()
        return dict(table), P
    table, P, _ = names.names_from_json(d)
    if P is None:
        raise DomainError("the names file does not declare a poset")
    return table, P


def _ideal(P, gens):
    gs = [_condition(g, P) for g in gens]
    return forcing.downward_closure(P, gs)


def cmd_name_eval(args):
    table, P = _names(args)
    if args.name not in table:
        raise DomainError(f"unknown name {args.name!r}; known: {', '.join(sorted(table))}")
    G = _ideal(P, args.ideal)
    v = forcing.is_ideal(G, P)
    if not v.ok:
        raise DomainError(f"not an ideal: {v.reason}")
    val = names.eval_name(table[args.name], G)
    _emit(args, format_hf(val), {"name": args.name, "value": format_hf(val),
                                 "ideal": [_plabel(p) for p in sorted(G.members(), key=_sortkey)]})


def _sortkey(p):
    return json.dumps(_plabel(p), sort_keys=True, default=str)


def cmd_force(args):
    table, P = _names(args)
    f = logic.parse(args.formula)
    binding = {}
    for k, v in _assignments(args.bind).items():
        if v not in table:
            raise DomainError(f"unknown name {v!r}")
        binding[k] = table[v]
    missing = logic.free_vars(f) - binding.keys()
    if missing:
        raise DomainError(f"unbound free variables: {', '.join(sorted(missing))}")
    env = ForcingEnv(P, binding=binding, rank_bound=args.rank_bound, budget=args.budget)
    conds = [_condition(c, P) for c in args.condition] if args.condition else list(P.elements())
    rows = []
    for p in conds:
        a, b = forces(p, f, env), semantic_forces(p, f, env)
        rows.append({"p": _plabel(p), "forces": a, "oracle": b})
    text = "\n".join(f"{_ptext(r['p'])}: {'forces' if r['forces'] else 'does not force'}"
                     + ("" if r["forces"] == r["oracle"] else " (oracle disagrees)") for r in rows)
    _emit(args, text, {"formula": logic.render(f), "universe": len(env.universe), "results": rows})


def cmd_ftf(args):
    P = _poset_from_args(args)
    env = ForcingEnv(P, rank_bound=args.rank_bound, budget=args.budget)
    fam = [logic.parse(t) for t in args.formulas] if args.formulas else formula_family()
    rep = check_ftf(fam, env, max_bindings=args.max_bindings)
    d = rep.to_json()
    d["universe"] = len(env.universe)
    text = (f"{'ok' if rep.ok else 'FAILED'}: {rep.formulas} formulas, {rep.bindings} bindings, "
            f"{rep.checked} checks over {len(env.universe)} names; {len(rep.violations)} violations")
    _emit(args, text, d)
    return 0 if rep.ok else 1


def _proof_from_args(args):
    if args.file is not None:
        with open(args.file, encoding="utf-8") as fh:
            raw = fh.read()
    else:
        raw = _read_input(args)
    if raw is None:
        raise _Usage("a proof file or --input is required")
    if raw.lstrip().startswith("{"):
        d = json.loads(raw)
        raw = "".join(f"{i}. {ln['formula']} ; {ln['justification']}\n" for i, ln in enumerate(d["lines"], 1))
    return proof.Proof.from_text(raw)


def _proof_json(p):
    return {"lines": [{"formula": logic.render(f), "justification": str(j)} for f, j in p.lines]}


def cmd_proof(args):
    if args.action == "empty-set":
        p = proof.empty_set_proof()
        _emit(args, p.to_text(), _proof_json(p))
        return 0
    p = _proof_from_args(args)
    if args.action == "check":
        v = proof.check_proof(p)
        if v.valid:
            text = f"valid: {len(p)} lines, concluding {logic.render(p.conclusion)}"
        else:
            text = "invalid\n" + "\n".join(f"line {n}: {m}" for n, m in v.diagnostics)
        _emit(args, text, v.to_json())
        return 0 if v.valid else 1
    if args.action == "relativize":
        fs = proof.relativize_proof(p, args.restrictor)
        _emit(args, "\n".join(logic.render(f) for f in fs), {"formulas": [logic.render(f) for f in fs]})
        return 0
    raise _Usage(f"unknown proof action {args.action!r}")


# --------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--input", metavar="FILE", help="read input from FILE ('-' for stdin)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--rank-bound", type=int, default=2, dest="rank_bound")
    common.add_argument("--budget", type=int, default=200)

    ap = argparse.ArgumentParser(prog="deskforcing", description="Finite-scale set theory and forcing toolkit.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def add(name, fn, help):
        p = sub.add_parser(name, parents=[common], help=help)
        p.set_defaults(fn=fn)
        return p

    p = add("parse", cmd_parse, "parse and pretty-print a formula")
    p.add_argument("formula", nargs="?")
    p = add("classify", cmd_classify, "Delta0 / Sigma1 / Pi1 / Higher")
    p.add_argument("formula", nargs="?")
    p = add("relativize", cmd_relativize, "restrict unbounded quantifiers to a set")
    p.add_argument("formula", nargs="?")
    p.add_argument("--to", dest="restrictor", default="M")
    p = add("eval", cmd_eval, "evaluate in V_n or a structure from --input")
    p.add_argument("formula")
    p.add_argument("--stage", type=int, default=3)
    p.add_argument("--assign", action="append", metavar="VAR=SET")
    p.add_argument("--tag", action="append", metavar="VAR=SET|SET|...")
    add("collapse", cmd_collapse, "Mostowski collapse of a membership digraph")
    p = add("reflect", cmd_reflect, "close a subset of V_n under witnesses for formulas")
    p.add_argument("formulas", nargs="+")
    p.add_argument("--stage", type=int, default=3)
    p.add_argument("--seed-node", dest="seed_nodes", action="append")
    p.add_argument("--extensional", action="store_true")
    p = add("ord", cmd_ord, "ordinal arithmetic below epsilon_0")
    p.add_argument("op", choices=("add", "mul", "pow", "cmp", "cf", "norm"))
    p.add_argument("operands", nargs="+")
    p = add("card", cmd_card, "cardinal expressions")
    p.add_argument("op", choices=("norm", "cmp", "koenig"))
    p.add_argument("operands", nargs="*")
    p.add_argument("--gch", action="store_true")
    p.add_argument("--max-len", type=int, default=4, dest="max_len")
    p.add_argument("--max-entry", type=int, default=5, dest="max_entry")
    p = add("continuum", cmd_continuum, "can 2^aleph_0 equal the given aleph?")
    p.add_argument("index")
    p = add("poset", cmd_poset, "describe a forcing poset")
    p.add_argument("poset", nargs="?")
    p = add("generic", cmd_generic, "build a generic chain on an infinite grid")
    p.add_argument("--rows", type=int, default=3)
    p.add_argument("--cols", type=int, default=4)
    p.add_argument("--ground", action="append", metavar="ROW:c1,c2,...")
    p = add("name-eval", cmd_name_eval, "evaluate a name under an ideal")
    p.add_argument("name")
    p.add_argument("--ideal", action="append", default=[], metavar="COND")
    p = add("force", cmd_force, "which conditions force a formula")
    p.add_argument("formula")
    p.add_argument("--bind", action="append", metavar="VAR=NAME")
    p.add_argument("--condition", action="append", metavar="COND")
    p = add("ftf", cmd_ftf, "compare the forcing relation with truth in generic extensions")
    p.add_argument("poset", nargs="?")
    p.add_argument("--formula", dest="formulas", action="append")
    p.add_argument("--max-bindings", type=int, default=None, dest="max_bindings")
    p = add("proof", cmd_proof, "check, print or relativise Hilbert proofs")
    p.add_argument("action", choices=("check", "empty-set", "relativize"))
    p.add_argument("file", nargs="?")
    p.add_argument("--to", dest="restrictor", default="M")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        rc = args.fn(args)
    except _Usage as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        sys.stdout = open(os.devnull, "w")
        return 0
    except (DomainError, json.JSONDecodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return rc or 0


if __name__ == "__main__":
    sys.exit(main())
