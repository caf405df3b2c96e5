"""Command-line front end.

Exit codes: 0 decided (either verdict), 1 usage or input error,
2 resource bounds exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .colgen import CgInstance, decide_unimodular_point_1d
from .decision import DecisionConfig, TargetStructureError, decide_epi_product, decide_epi_virtually_cyclic
from .finite_groups import FiniteGroup, GroupAxiomError, enumerate_epis
from .intlinalg import IntMatrix, abelian_invariants, smith_normal_form
from .rewriting import kernel_presentation
from .vab import VabSearchReport, WordProblemConfig, vab_structure
from .words import (
    PresentationSyntaxError,
    abelianization_matrix,
    format_presentation,
    format_word,
    parse_presentation,
    symmetrize,
)

EXIT_OK, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read_presentation(path: str):
    return parse_presentation(Path(path).read_text(encoding="utf-8"))


def _read_json(path: str):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _wp_config(text: str | None) -> WordProblemConfig:
    if not text:
        return WordProblemConfig()
    try:
        a, b = (int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"--wp-bounds expects two integers 'a,b', got {text!r}")
    return WordProblemConfig(max_relator_products=a, max_quotient_order=b)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="vabepi", description="Epimorphisms onto Z^d x F and onto virtually cyclic groups.")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name in ("parse", "symmetrize", "abelianize"):
        sp = sub.add_parser(name)
        sp.add_argument("pres")
    sp = sub.add_parser("epis")
    sp.add_argument("pres")
    sp.add_argument("--finite", required=True)
    sp = sub.add_parser("kernel")
    sp.add_argument("pres")
    sp.add_argument("--finite", required=True)
    sp.add_argument("--epi", type=int, default=0)
    sp = sub.add_parser("snf")
    sp.add_argument("matrix")
    sp = sub.add_parser("colgen1d")
    sp.add_argument("instance")
    sp = sub.add_parser("vab-structure")
    sp.add_argument("pres")
    sp.add_argument("--max-order", type=int, default=24)
    sp.add_argument("--wp-bounds")
    sp = sub.add_parser("decide-prod")
    sp.add_argument("pres")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--finite", required=True)
    sp = sub.add_parser("decide-vz")
    sp.add_argument("pres")
    sp.add_argument("--target", required=True)
    sp.add_argument("--max-order", type=int, default=24)
    sp.add_argument("--wp-bounds")
    # --json is accepted after the subcommand too
    for sp in sub.choices.values():
        sp.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    return p


def _emit(args, human: str, payload) -> None:
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print(human)


def _cmd_parse(args):
    P = _read_presentation(args.pres)
    _emit(args, format_presentation(P).rstrip(), {"generators": list(P.generators),
                                                 "relators": [format_word(r) for r in P.relators],
                                                 "symmetric": P.symmetric})
    return EXIT_OK


def _cmd_symmetrize(args):
    S = symmetrize(_read_presentation(args.pres))
    _emit(args, format_presentation(S).rstrip(), {"generators": list(S.generators),
                                                 "relators": [format_word(r) for r in S.relators],
                                                 "symmetric": True})
    return EXIT_OK


def _cmd_abelianize(args):
    A = abelianization_matrix(_read_presentation(args.pres))
    snf = smith_normal_form(A)
    rank, torsion = abelian_invariants(A)
    factors = [x for x in snf.invariant_factors if x != 1]
    human = f"invariant factors: {' '.join(map(str, torsion)) or '(none)'}\nfree rank: {rank}"
    _emit(args, human, {"invariant_factors": list(snf.invariant_factors), "torsion": list(torsion),
                        "free_rank": rank, "nontrivial_factors": factors})
    return EXIT_OK


def _cmd_epis(args):
    P = _read_presentation(args.pres)
    F = FiniteGroup.from_json(_read_json(args.finite))
    epis = enumerate_epis(P, F)
    lines = [f"[{i}] " + ", ".join(f"{s} -> {F.elements[x]}" for s, x in zip(P.generators, e.images))
             for i, e in enumerate(epis)]
    lines.append(f"{len(epis)} epimorphism(s)")
    _emit(args, "\n".join(lines), [e.to_json() for e in epis])
    return EXIT_OK


def _cmd_kernel(args):
    P = _read_presentation(args.pres)
    F = FiniteGroup.from_json(_read_json(args.finite))
    Ps = symmetrize(P) if not P.symmetric else P
    epis = enumerate_epis(Ps, F)
    if not 0 <= args.epi < len(epis):
        raise UsageError(f"--epi {args.epi} out of range: {len(epis)} epimorphism(s)")
    kp = kernel_presentation(Ps, epis[args.epi])
    human = format_presentation(kp.presentation) + "\n".join(
        f"# {k} = {format_word(v)}" for k, v in kp.inclusion.items())
    _emit(args, human, {"generators": list(kp.presentation.generators),
                        "relators": [format_word(r) for r in kp.presentation.relators],
                        "inclusion": kp.inclusion_json()})
    return EXIT_OK


def _cmd_snf(args):
    A = IntMatrix.from_json(_read_json(args.matrix))
    snf = smith_normal_form(A)
    human = "invariant factors: " + " ".join(map(str, snf.invariant_factors))
    _emit(args, human, {"invariant_factors": [str(x) for x in snf.invariant_factors],
                        "U": snf.U.to_json(), "D": snf.D.to_json(), "V": snf.V.to_json()})
    return EXIT_OK


def _cmd_colgen1d(args):
    inst = CgInstance.from_json(_read_json(args.instance))
    res = decide_unimodular_point_1d(inst)
    if res is None:
        _emit(args, "no", {"verdict": "no", "witness": None})
    else:
        _emit(args, "yes " + " ".join(map(str, res.point)),
              {"verdict": "yes", "witness": [str(x) for x in res.point],
               "coefficients": [str(x) for x in res.coefficients]})
    return EXIT_OK


def _cmd_vab_structure(args):
    P = _read_presentation(args.pres)
    report = VabSearchReport()
    S = vab_structure(P, args.max_order, _wp_config(args.wp_bounds), report)
    if S is None:
        msg = "not found" + (" (word-problem bounds hit)" if report.inconclusive else "")
        for line in report.diagnostics:
            print(line, file=sys.stderr)
        _emit(args, msg, {"found": False, "diagnostics": report.diagnostics})
        return EXIT_RESOURCE
    L = S.data
    human = "\n".join([
        f"finite quotient order: {L.F.order}",
        f"epimorphism: " + ", ".join(f"{s} -> {L.F.elements[x]}" for s, x in zip(P.generators, S.phi.images)),
        f"d: {L.d}",
        "kernel basis: " + ", ".join(format_word(b) for b in S.kernel_basis),
        "action: " + "; ".join(f"{L.F.elements[g]}: {L.C(g).tolist()}" for g in range(L.F.order)),
    ])
    _emit(args, human, {"found": True, "vab": L.to_json(), "epimorphism": S.phi.to_json(),
                        "kernel_basis": [format_word(b) for b in S.kernel_basis]})
    return EXIT_OK


def _answer_out(args, ans):
    if ans.verdict == "yes":
        human = "yes\n" + "\n".join(
            f"  {s} -> {w.get('word', '')} {tuple(w['vec'])} {w['fin']}".rstrip() for s, w in ans.witness.items())
    else:
        human = ans.verdict
    _emit(args, human, ans.to_json())
    return EXIT_RESOURCE if ans.verdict == "inconclusive" else EXIT_OK


def _cmd_decide_prod(args):
    P = _read_presentation(args.pres)
    F = FiniteGroup.from_json(_read_json(args.finite))
    if args.d < 0:
        raise UsageError("--d must be nonnegative")
    return _answer_out(args, decide_epi_product(P, args.d, F))


def _cmd_decide_vz(args):
    P = _read_presentation(args.pres)
    Q = _read_presentation(args.target)
    cfg = DecisionConfig(max_order=args.max_order, wp=_wp_config(args.wp_bounds))
    return _answer_out(args, decide_epi_virtually_cyclic(P, Q, cfg))


COMMANDS = {
    "parse": _cmd_parse,
    "symmetrize": _cmd_symmetrize,
    "abelianize": _cmd_abelianize,
    "epis": _cmd_epis,
    "kernel": _cmd_kernel,
    "snf": _cmd_snf,
    "colgen1d": _cmd_colgen1d,
    "vab-structure": _cmd_vab_structure,
    "decide-prod": _cmd_decide_prod,
    "decide-vz": _cmd_decide_vz,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (OSError, json.JSONDecodeError, PresentationSyntaxError, GroupAxiomError,
            TargetStructureError, KeyError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
