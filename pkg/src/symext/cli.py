"""Command-line front end.

Subcommands: check, extend, verify-extension, channel, gallery, scan.
Exit codes are a stable contract: 0 computed-yes, 1 computed-no,
2 invalid input, 3 undecided.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import gallery, io, states, twoqubit
from .channels import (
    Channel,
    ChannelTag,
    choi_state,
    classify_channel,
    complementary_channel,
)
from .errors import SymextError
from .oracle import Feasibility, OracleOptions, find_symmetric_extension
from .states import BipartiteState

EXIT_YES = 0
EXIT_NO = 1
EXIT_INVALID = 2
EXIT_UNDECIDED = 3


@dataclass
class Verdict:
    question: str
    answer: str  # yes | no | undecided
    method: str
    proven: bool
    residuals: dict = field(default_factory=dict)
    witness_path: str | None = None

    def exit_code(self) -> int:
        return {"yes": EXIT_YES, "no": EXIT_NO}.get(self.answer, EXIT_UNDECIDED)

    def emit(self, as_json: bool) -> None:
        if as_json:
            payload = {
                "question": self.question,
                "answer": self.answer,
                "method": self.method,
                "proven": self.proven,
                "residuals": {k: float(v) for k, v in self.residuals.items()},
            }
            if self.witness_path:
                payload["witness_path"] = self.witness_path
            print(json.dumps(payload, sort_keys=True))
            return
        print(f"question: {self.question}")
        print(f"answer: {self.answer}")
        print(f"method: {self.method}")
        print(f"proven: {'true' if self.proven else 'false'}")
        for key, value in self.residuals.items():
            print(f"residual.{key}: {io.format_real(value)}")
        if self.witness_path:
            print(f"witness: {self.witness_path}")


def _oracle_options(args) -> OracleOptions:
    kwargs = {"symmetry": args.symmetry}
    if args.tol is not None:
        kwargs["tol_feasible"] = args.tol
    return OracleOptions(**kwargs)


def _zcorr_from_state(rho: BipartiteState) -> twoqubit.ZCorrParams | None:
    """Recognize the diagonal-plus-antidiagonal family in the computational
    basis, canonicalizing with the local relabelings that preserve the form."""
    if rho.d_a != 2 or rho.d_b != 2:
        return None
    m = np.asarray(rho.matrix)
    pattern = np.ones((4, 4), dtype=bool)
    pattern[np.eye(4, dtype=bool)] = False
    pattern[0, 3] = pattern[3, 0] = pattern[1, 2] = pattern[2, 1] = False
    if np.max(np.abs(m[pattern])) > 1e-12:
        return None
    if abs(np.imag(m[0, 3])) > 1e-12 or abs(np.imag(m[1, 2])) > 1e-12:
        return None
    diag = np.real(np.diag(m))
    x, y = abs(np.real(m[0, 3])), abs(np.real(m[1, 2]))
    # relabelings: identity, X(x)X (p1<->p4, p2<->p3), I(x)X and X(x)I (swap x and y)
    candidates = [
        (diag[0], diag[1], diag[2], diag[3], x, y),
        (diag[3], diag[2], diag[1], diag[0], x, y),
        (diag[1], diag[0], diag[3], diag[2], y, x),
        (diag[2], diag[3], diag[0], diag[1], y, x),
    ]
    for p1, p2, p3, p4, cx, cy in candidates:
        if p1 >= max(p2, p3, p4) - 1e-12:
            return twoqubit.ZCorrParams(p1, p2, p3, p4, cx, cy)
    return None


def _check_auto(rho: BipartiteState, opts: OracleOptions) -> Verdict:
    question = "symmetric extension"
    if opts.symmetry != "any":
        result = find_symmetric_extension(rho, opts)
        return _verdict_from_oracle(question, result)

    if rho.purity() >= 1.0 - 1e-9:
        ok = states.spectrum_condition(rho)
        return Verdict(question, "yes" if ok else "no", "closed-form(spectrum)", True)

    coherent = states.coherent_information(rho)
    if coherent > 1e-6:
        return Verdict(question, "no", "closed-form(coherent-information)", True,
                       residuals={"coherent_information": coherent})

    if rho.rank() == 2:
        mat = np.asarray(rho.matrix)
        if not twoqubit._rank_le2_necessary_ok(mat, rho.d_a, rho.d_b):
            return Verdict(question, "no", "closed-form(rank2)", True)
        if rho.d_a == 2:
            return Verdict(question, "yes", "closed-form(rank2)", True)

    if rho.d_a == 2 and rho.d_b == 2:
        bell = twoqubit.bell_diagonal_from_state(rho)
        if bell is not None:
            ok = twoqubit.bell_extendible(bell)
            return Verdict(question, "yes" if ok else "no", "closed-form(bell-diagonal)", True,
                           residuals={"margin": max(twoqubit.bell_margins(bell))})
        zc = _zcorr_from_state(rho)
        if zc is not None and zc.y <= 1e-12:
            bound = twoqubit.zcorr_bound_y0(zc.p1, zc.p2, zc.p3, zc.p4)
            ok = zc.x <= bound + 1e-9
            return Verdict(question, "yes" if ok else "no", "closed-form(zcorr-y0)", True,
                           residuals={"coupling_slack": bound - zc.x})
        if zc is not None:
            ok = twoqubit.zcorr_extendible(zc)
            return Verdict(question, "yes" if ok else "no", "closed-form(zcorr-grid)", False)

    return _verdict_from_oracle(question, find_symmetric_extension(rho, opts))


def _verdict_from_oracle(question: str, result) -> Verdict:
    answer = {Feasibility.FEASIBLE: "yes", Feasibility.INFEASIBLE: "no"}.get(
        result.status, "undecided")
    residuals = {"oracle": result.residual}
    if result.witness is not None:
        residuals["witness_symmetry"] = result.witness.symmetry_residual
        residuals["witness_reduction"] = result.witness.reduction_residual
    return Verdict(question, answer, result.method, False, residuals=residuals)


def cmd_check(args) -> int:
    rho = io.load_state(args.file)
    opts = _oracle_options(args)
    if args.method == "auto":
        verdict = _check_auto(rho, opts)
    elif args.method == "spectrum":
        ok = states.spectrum_condition(rho)
        if rho.purity() >= 1.0 - 1e-9 or (rho.d_a == 2 and rho.d_b == 2 and ok):
            verdict = Verdict("symmetric extension", "yes" if ok else "no",
                              "spectrum", True)
        elif ok:
            # condition holds but is only necessary for pure extendibility here
            verdict = Verdict("symmetric extension", "undecided", "spectrum", False)
        else:
            verdict = Verdict("pure symmetric extension", "no", "spectrum", True)
    elif args.method == "conjecture":
        margin = twoqubit.conjecture_margin(rho)
        verdict = Verdict("symmetric extension", "yes" if margin >= -1e-10 else "no",
                          "conjecture", False, residuals={"margin": margin})
    else:
        verdict = _verdict_from_oracle("symmetric extension", find_symmetric_extension(rho, opts))
    verdict.emit(args.json)
    return verdict.exit_code()


def cmd_extend(args) -> int:
    rho = io.load_state(args.file)
    opts = _oracle_options(args)
    witness = None
    method = "oracle"
    if rho.d_a == 2 and rho.d_b == 2 and states.spectrum_condition(rho):
        witness = twoqubit.construct_pure_extension(rho)
        method = "closed-form(pure-extension)"
    elif rho.d_a == 2 and rho.d_b == 2 and rho.rank() == 2 and twoqubit.rank2_condition(rho):
        witness = twoqubit.rank2_decompose(rho).mixed_extension(rho)
        method = "closed-form(rank2-decomposition)"
    else:
        result = find_symmetric_extension(rho, opts)
        if result.status is Feasibility.INFEASIBLE:
            Verdict("symmetric extension", "no", result.method, False,
                    residuals={"oracle": result.residual}).emit(args.json)
            return EXIT_NO
        if result.status is Feasibility.UNDECIDED:
            Verdict("symmetric extension", "undecided", result.method, False,
                    residuals={"oracle": result.residual}).emit(args.json)
            return EXIT_UNDECIDED
        witness = result.witness
        method = result.method

    io.save_extension(args.output, witness)
    reloaded = io.load_extension(args.output, rho)
    if not states.is_symmetric_extension(reloaded, rho, tol=args.tol or 1e-7):
        print("error: witness failed re-verification after write", file=sys.stderr)
        return EXIT_INVALID
    Verdict("symmetric extension", "yes", method, method.startswith("closed-form"),
            residuals={"symmetry": reloaded.symmetry_residual,
                       "reduction": reloaded.reduction_residual},
            witness_path=args.output).emit(args.json)
    return EXIT_YES


def cmd_verify_extension(args) -> int:
    rho = io.load_state(args.state_file)
    sigma = io.load_extension(args.ext_file, rho)
    tol = args.tol or 1e-7
    ok = states.is_symmetric_extension(sigma, rho, tol=tol)
    Verdict("is symmetric extension", "yes" if ok else "no", "definition", True,
            residuals={"symmetry": sigma.symmetry_residual,
                       "reduction": sigma.reduction_residual}).emit(args.json)
    return EXIT_YES if ok else EXIT_NO


def cmd_channel(args) -> int:
    channel = io.load_channel(args.kraus_file)
    if args.action == "choi":
        choi = choi_state(channel)
        if args.output:
            io.save_state(args.output, choi.state)
            print(f"choi: {args.output}")
        else:
            print(json.dumps({"dims": [choi.d_in, choi.d_out],
                              "matrix": io.matrix_to_json(choi.state.matrix)}))
        return EXIT_YES
    if args.action == "complement":
        comp = complementary_channel(channel)
        if args.output:
            io.save_channel(args.output, comp)
            print(f"complement: {args.output}")
        else:
            print(json.dumps({"d_in": comp.d_in, "d_out": comp.d_out,
                              "kraus": [io.matrix_to_json(k) for k in comp.kraus]}))
        return EXIT_YES

    opts = _oracle_options(args)
    result = classify_channel(channel, opts)
    answer = {
        ChannelTag.DEGRADABLE: "degradable",
        ChannelTag.ANTI_DEGRADABLE: "anti-degradable",
        ChannelTag.BOTH: "both",
        ChannelTag.NEITHER: "neither",
        ChannelTag.UNDECIDED: "undecided",
    }[result.tag]
    if args.json:
        print(json.dumps({
            "classification": answer,
            "degradable": result.degradable.status.value,
            "anti_degradable": result.anti_degradable.status.value,
            "methods": {"degradable": result.degradable.method,
                        "anti_degradable": result.anti_degradable.method},
        }, sort_keys=True))
    else:
        print(f"classification: {answer}")
        print(f"degradable: {result.degradable.status.value} ({result.degradable.method})")
        print(f"anti-degradable: {result.anti_degradable.status.value} "
              f"({result.anti_degradable.method})")
    if result.tag is ChannelTag.UNDECIDED:
        return EXIT_UNDECIDED
    return EXIT_YES


def cmd_gallery(args) -> int:
    builder = gallery.ENTRIES.get(args.name)
    if builder is None:
        print(f"error: unknown gallery entry {args.name!r}", file=sys.stderr)
        return EXIT_INVALID
    if args.name == "example3":
        entry = builder(s=args.s, p=args.p)
    elif args.name == "werner":
        entry = builder(steps=args.steps)
    else:
        entry = builder()
    print(f"name: {entry.name}")
    print(f"description: {entry.description}")
    print(f"extendible: {entry.extendible}")
    for key, value in entry.findings:
        print(f"{key}: {value}")
    if args.name == "werner" and args.csv:
        with open(args.csv, "w") as fh:
            io.write_csv(fh, ["p", "conjecture", "oracle", "threshold"],
                         _werner_rows(args.steps))
        print(f"csv: {args.csv}")
    return EXIT_YES if entry.extendible == "yes" else (
        EXIT_NO if entry.extendible == "no" else EXIT_UNDECIDED)


def _werner_rows(steps: int):
    threshold = gallery.werner_threshold()
    for p in np.linspace(0.0, 1.0, steps):
        state = gallery.werner(float(p))
        conj = twoqubit.check_conjecture(state)
        result = find_symmetric_extension(state)
        yield [float(p), str(conj), result.status.value, threshold]


def cmd_scan(args) -> int:
    stream = open(args.csv, "w") if args.csv else sys.stdout
    try:
        if args.family == "werner":
            rows = []
            for p in np.linspace(0.0, 1.0, args.steps):
                bell = gallery.werner_bell_params(float(p))
                closed = twoqubit.bell_extendible(bell)
                conj = twoqubit.check_conjecture(gallery.werner(float(p)))
                rows.append([float(p), str(closed), str(conj), str(closed == conj)])
            io.write_csv(stream, ["p", "closed_form", "conjecture", "agree"], rows)
        elif args.family == "bell":
            rows = []
            grid = np.linspace(0.0, 1.0, args.steps)
            for pi in grid:
                for px in grid:
                    for py in grid:
                        pz = 1.0 - pi - px - py
                        if pz < -1e-12:
                            continue
                        params = twoqubit.BellDiagonalParams(float(pi), float(px),
                                                             float(py), max(float(pz), 0.0))
                        closed = twoqubit.bell_extendible(params)
                        conj = twoqubit.bell_conjecture_form(params)
                        rows.append([float(pi), float(px), float(py), max(float(pz), 0.0),
                                     str(closed), str(conj), str(closed == conj)])
            io.write_csv(stream, ["p_i", "p_x", "p_y", "p_z",
                                  "closed_form", "conjecture_form", "agree"], rows)
        elif args.family == "zcorr":
            rng = np.random.default_rng(args.seed)
            rows = []
            for _ in range(args.samples):
                probs = np.sort(rng.dirichlet([1.0] * 4))[::-1]
                p1, rest = probs[0], rng.permutation(probs[1:])
                p2, p3, p4 = (float(v) for v in rest)
                x = float(rng.uniform(0.0, np.sqrt(max(p1 * p4, 0.0))))
                z = twoqubit.ZCorrParams(float(p1), p2, p3, p4, x, 0.0)
                bound = twoqubit.zcorr_bound_y0(z.p1, z.p2, z.p3, z.p4)
                extendible = twoqubit.zcorr_extendible(z)
                conj = twoqubit.check_conjecture(z.state())
                rows.append([z.p1, z.p2, z.p3, z.p4, z.x, bound,
                             str(extendible), str(conj)])
            io.write_csv(stream, ["p1", "p2", "p3", "p4", "x", "y0_bound",
                                  "extendible", "conjecture"], rows)
        else:  # amplitude-damping
            rows = []
            for eta in np.linspace(0.0, 1.0, args.steps):
                channel = amplitude_damping(float(eta))
                result = classify_channel(channel)
                rows.append([float(eta), result.degradable.status.value,
                             result.anti_degradable.status.value, result.tag.value])
            io.write_csv(stream, ["eta", "degradable", "anti_degradable", "class"], rows)
    finally:
        if args.csv:
            stream.close()
    return EXIT_YES


def amplitude_damping(eta: float) -> Channel:
    """Damping with transmission eta: eta = 1 is the identity channel."""
    k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(eta)]], dtype=np.complex128)
    k1 = np.array([[0.0, np.sqrt(1.0 - eta)], [0.0, 0.0]], dtype=np.complex128)
    return Channel((k0, k1), 2, 2)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symext",
        description="Symmetric extendibility of bipartite states and channel degradability")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--symmetry", choices=["any", "bosonic", "fermionic"], default="any")
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--seed", type=int, default=7)
        p.add_argument("--json", action="store_true")

    p_check = sub.add_parser("check", help="decide symmetric extendibility of a state file")
    p_check.add_argument("file")
    p_check.add_argument("--method", choices=["auto", "spectrum", "conjecture", "oracle"],
                         default="auto")
    common(p_check)
    p_check.set_defaults(func=cmd_check)

    p_ext = sub.add_parser("extend", help="construct and save a symmetric extension")
    p_ext.add_argument("file")
    p_ext.add_argument("-o", "--output", required=True)
    common(p_ext)
    p_ext.set_defaults(func=cmd_extend)

    p_ver = sub.add_parser("verify-extension", help="verify an extension file against a state file")
    p_ver.add_argument("ext_file")
    p_ver.add_argument("state_file")
    common(p_ver)
    p_ver.set_defaults(func=cmd_verify_extension)

    p_ch = sub.add_parser("channel", help="channel tools: classify, choi, complement")
    p_ch.add_argument("action", choices=["classify", "choi", "complement"])
    p_ch.add_argument("kraus_file")
    p_ch.add_argument("-o", "--output", default=None)
    common(p_ch)
    p_ch.set_defaults(func=cmd_channel)

    p_gal = sub.add_parser("gallery", help="named example states with recomputed findings")
    p_gal.add_argument("name", choices=sorted(gallery.ENTRIES))
    p_gal.add_argument("--s", type=float, default=0.75)
    p_gal.add_argument("--p", type=float, default=0.5)
    p_gal.add_argument("--steps", type=int, default=21)
    p_gal.add_argument("--csv", default=None)
    common(p_gal)
    p_gal.set_defaults(func=cmd_gallery)

    p_scan = sub.add_parser("scan", help="parameter sweeps emitting CSV")
    p_scan.add_argument("family", choices=["werner", "bell", "zcorr", "amplitude-damping"])
    p_scan.add_argument("--steps", type=int, default=50)
    p_scan.add_argument("--samples", type=int, default=200)
    p_scan.add_argument("--csv", default=None)
    common(p_scan)
    p_scan.set_defaults(func=cmd_scan)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except io.FileFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SymextError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
