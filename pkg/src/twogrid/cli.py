"""Command-line harness: every experiment as a reproducible run.

Subcommands emit CSV (default) or JSON on stdout or to ``--out``; the
same data can be rendered to a figure with ``--plot``.  Exit codes are
a stable contract: 0 success/verified, 2 usage error, 3 verification
failure, 4 numerical failure.
"""

import argparse
import json
import sys

import numpy as np

from . import problems, relaxation
from .linalg import (
    SingularMatrixError,
    eigenvalues,
    fov_boundary,
)
from .tolerances import DEFAULT
from .twolevel import (
    CoarsePolicy,
    CycleConfig,
    TwoLevelComponents,
    error_operator,
    exact_components,
    preconditioned_spectrum,
    split,
    vcycle_apply,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VERIFICATION = 3
EXIT_NUMERICAL = 4

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _emit(args, lines, payload):
    if args.format == "json":
        text = json.dumps(payload, indent=2) + "\n"
    else:
        text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"cannot parse complex number {text!r}") from exc


def _build_schedule(args) -> relaxation.RelaxationSchedule:
    kind = args.schedule
    alphas = args.alpha or []
    m = 1 if args.m is None else args.m
    if kind == "theorem":
        return relaxation.theorem_schedule(m)
    if kind == "constant":
        if len(alphas) != 1:
            raise ValueError("constant schedule needs exactly one --alpha")
        return relaxation.constant_schedule(alphas[0], m)
    if not alphas:
        raise ValueError("list schedule needs repeated --alpha values")
    if args.m is not None and args.m != len(alphas):
        raise ValueError("--m disagrees with the number of --alpha values")
    return relaxation.schedule_from_alphas(alphas)


def _coarse_policy(args) -> CoarsePolicy:
    return CoarsePolicy(kind=args.coarse, direct_threshold=args.coarse_threshold)


# ---------------------------------------------------------------------------
# schedule
# ---------------------------------------------------------------------------


def cmd_schedule(args) -> int:
    if args.m < 1:
        print("error: schedule requires m >= 1", file=sys.stderr)
        return EXIT_USAGE
    sched = relaxation.theorem_schedule(args.m)
    thetas = [2.0 * np.pi * j / (2 * args.m + 1) for j in range(1, args.m + 1)]
    product = float(np.prod(sched.alphas))
    clustered = relaxation.clustered_eigenvalue(args.m)
    lines = ["j,theta,alpha"]
    for j, (theta, alpha) in enumerate(zip(thetas, sched.alphas), start=1):
        lines.append(f"{j},{_fmt(theta)},{_fmt(alpha)}")
    lines.append(f"alpha_product,,{_fmt(product)}")
    lines.append(f"clustered_eigenvalue,,{_fmt(clustered)}")
    payload = {
        "m": args.m,
        "theta": [float(t) for t in thetas],
        "alphas": [float(a) for a in sched.alphas],
        "alpha_product": product,
        "clustered_eigenvalue": clustered,
    }
    _emit(args, lines, payload)
    return EXIT_OK


# ---------------------------------------------------------------------------
# respond
# ---------------------------------------------------------------------------


def _lambda_grid(args):
    if args.lam:
        return list(args.lam)
    count = args.grid_points
    radius = args.grid_radius
    out = []
    for k in range(count):
        r = radius * np.sqrt((k + 0.5) / count)
        phi = 2.0 * np.pi * _GOLDEN * k
        out.append(complex(r * np.cos(phi), r * np.sin(phi)))
    return out


def cmd_respond(args) -> int:
    try:
        sched = _build_schedule(args)
    except (ValueError, relaxation.InvalidMError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    grid = _lambda_grid(args)
    if not grid:
        print("error: empty lambda grid", file=sys.stderr)
        return EXIT_USAGE
    samples = [relaxation.scalar_response_closed(sched, lam) for lam in grid]
    lines = ["re_lambda,im_lambda,re_r,im_r"]
    for s in samples:
        lines.append(
            f"{_fmt(s.lam.real)},{_fmt(s.lam.imag)},{_fmt(s.value.real)},{_fmt(s.value.imag)}"
        )
    payload = {
        "m": sched.m,
        "source": sched.source,
        "samples": [
            {"lambda": [s.lam.real, s.lam.imag], "r": [s.value.real, s.value.imag]}
            for s in samples
        ],
    }
    if sched.source == "theorem":
        deviation = max(abs(s.value - 1.0 / (2 * sched.m + 1) ** 2) for s in samples)
        lines.append(f"max_deviation,,{_fmt(deviation)},")
        payload["max_deviation_from_constant"] = deviation
    _emit(args, lines, payload)
    if args.plot:
        from . import plotting

        plotting.render_response(samples, args.plot)
    return EXIT_OK


# ---------------------------------------------------------------------------
# cluster
# ---------------------------------------------------------------------------


def _fd2d_checkerboard(n_grid: int) -> np.ndarray:
    idx = np.arange(n_grid * n_grid)
    return idx[(idx // n_grid + idx % n_grid) % 2 == 0]


def _cluster_problem(args, policy):
    """Returns (block system, components, clustering_claimed)."""
    if args.problem == "random-block":
        sys_ = problems.random_block_system(args.n1, args.n2, args.seed)
        return sys_, exact_components(sys_, policy), True
    if args.problem == "fd1d":
        a1 = problems.fd1d_matrix(problems.Fd1dSpec(N=args.N))
        sys_ = split(a1, np.arange(0, args.N, 2))
        return sys_, exact_components(sys_, policy), True
    if args.problem == "fd2d":
        spec = problems.Fd2dSpec(N=args.N)
        a2 = problems.fd2d_matrix(spec)
        if args.components == "exact":
            sys_ = split(a2, _fd2d_checkerboard(args.N))
            return sys_, exact_components(sys_, policy), True
        p1, r1 = problems.transfers_1d(problems.Fd1dSpec(N=args.N, h=spec.h))
        p, r = problems.tensor_lift(p1, r1)
        comp = TwoLevelComponents(
            smoother_inverse=problems.diag_jacobi_inverse(a2),
            p=p.astype(complex),
            r=r.astype(complex),
            m0=(r @ a2 @ p).astype(complex),
            coarse_policy=policy,
            exact=False,
        )
        # the transfers live in the natural ordering, so keep the matrix
        # unpermuted; the partition itself is unused by inexact components
        sys_ = split(a2, np.arange(a2.shape[0] // 2))
        return sys_, comp, False
    if args.problem == "sipg":
        matrix = problems.sipg_1d_matrix(args.elements, args.delta)
        sys_ = problems.dg_element_redblack_split(matrix)
        return sys_, exact_components(sys_, policy), True
    if args.problem == "dg-stencil":
        matrix = problems.sipg_1d_matrix(args.elements, args.delta)
        spec = problems.DgSpec(
            num_elements=args.elements, delta=args.delta,
            permutation_kind=args.dg_kind,
        )
        p, smoother = problems.dg_assemble(spec)
        r = p.T.copy()
        comp = TwoLevelComponents(
            smoother_inverse=smoother,
            p=p.astype(complex),
            r=r.astype(complex),
            m0=(r @ matrix @ p).astype(complex),
            coarse_policy=policy,
            exact=False,
        )
        sys_ = split(matrix, np.arange(matrix.shape[0] // 2))
        return sys_, comp, False
    if args.problem == "nonnormal":
        spec = problems.RandomNonnormalSpec(
            n=args.n, eta=args.eta, gamma=args.gamma, seed=args.seed
        )
        sys_ = problems.alternating_split(problems.random_nonnormal(spec))
        return sys_, exact_components(sys_, policy), True
    raise ValueError(f"unknown problem {args.problem!r}")


def _report_output(args, report):
    lines = ["kind,re,im,count"]
    for z in report.eigenvalues:
        lines.append(f"eigenvalue,{_fmt(z.real)},{_fmt(z.imag)},")
    for center, mult in zip(report.cluster_centers, report.multiplicity_per_center):
        lines.append(f"center,{_fmt(center.real)},{_fmt(center.imag)},{mult}")
    lines.append(f"max_deviation,{_fmt(report.max_deviation)},,")
    payload = {
        "eigenvalues": [[z.real, z.imag] for z in report.eigenvalues],
        "cluster_centers": [[c.real, c.imag] for c in report.cluster_centers],
        "max_deviation": report.max_deviation,
        "multiplicity_per_center": list(report.multiplicity_per_center),
    }
    _emit(args, lines, payload)


def cmd_cluster(args) -> int:
    policy = _coarse_policy(args)
    try:
        sched = _build_schedule(args)
        sys_, comp, claimed = _cluster_problem(args, policy)
        cfg = CycleConfig(schedule=sched)
        report = preconditioned_spectrum(sys_, comp, cfg, refine=args.refine)
    except (ValueError, relaxation.InvalidMError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SingularMatrixError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    _report_output(args, report)
    if args.plot:
        from . import plotting

        plotting.render_cluster(report, args.plot)
    if claimed and sched.source == "theorem":
        if report.max_deviation > DEFAULT.cli_cluster_deviation:
            print(
                f"verification failure: max deviation {report.max_deviation:.3e} "
                f"exceeds {DEFAULT.cli_cluster_deviation:g}",
                file=sys.stderr,
            )
            return EXIT_VERIFICATION
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep-rho
# ---------------------------------------------------------------------------


def cmd_sweep_rho(args) -> int:
    if args.m_max < 1 or args.m_max > 8:
        print("error: m range must stay within 1..8 (runtime guard)", file=sys.stderr)
        return EXIT_USAGE
    try:
        spec = problems.Fd2dSpec(N=args.N)
        a2 = problems.fd2d_matrix(spec)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    p1, r1 = problems.transfers_1d(problems.Fd1dSpec(N=args.N, h=spec.h))
    p, r = problems.tensor_lift(p1, r1)
    comp = TwoLevelComponents(
        smoother_inverse=problems.diag_jacobi_inverse(a2),
        p=p.astype(complex),
        r=r.astype(complex),
        m0=(r @ a2 @ p).astype(complex),
        exact=False,
    )
    sys_ = split(a2, np.arange(a2.shape[0] // 2))

    def rho(schedule):
        e_m = error_operator(sys_, comp, CycleConfig(schedule=schedule))
        return float(np.abs(eigenvalues(e_m)).max())

    rows = []
    for alpha in [round(0.1 * k, 1) for k in range(1, 11)]:
        for m in range(1, args.m_max + 1):
            rows.append(("constant", alpha, m, rho(relaxation.constant_schedule(alpha, m))))
    for m in range(1, args.m_max + 1):
        rows.append(("constant-2/3", 2.0 / 3.0, m,
                     rho(relaxation.constant_schedule(2.0 / 3.0, m))))
    for m in range(1, args.m_max + 1):
        rows.append(("theorem", "", m, rho(relaxation.theorem_schedule(m))))
    lines = ["family,alpha,m,rho"]
    for family, alpha, m, value in rows:
        lines.append(f"{family},{_fmt(alpha)},{m},{_fmt(value)}")
    payload = {
        "N": args.N,
        "rows": [
            {"family": fam, "alpha": (None if alpha == "" else float(alpha)),
             "m": m, "rho": value}
            for fam, alpha, m, value in rows
        ],
    }
    _emit(args, lines, payload)
    if args.plot:
        from . import plotting

        plotting.render_sweep(
            [(fam, alpha, m, val) for fam, alpha, m, val in rows], args.plot
        )
    return EXIT_OK


# ---------------------------------------------------------------------------
# fov
# ---------------------------------------------------------------------------


def cmd_fov(args) -> int:
    if args.n > 256:
        print("error: fov is capped at n = 256", file=sys.stderr)
        return EXIT_USAGE
    m_list = args.m or [1, 2, 3]
    try:
        spec = problems.RandomNonnormalSpec(
            n=args.n, eta=args.eta, gamma=args.gamma, seed=args.seed
        )
        b = problems.random_nonnormal(spec)
        schedules = [relaxation.theorem_schedule(m) for m in m_list]
        if args.fov_angles < 8:
            raise ValueError("fov needs at least 8 angles")
    except (ValueError, relaxation.InvalidMError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        sys_ = problems.alternating_split(b)
        comp = exact_components(sys_, _coarse_policy(args))
        operators = [("B", b)]
        for m, schedule in zip(m_list, schedules):
            cfg = CycleConfig(schedule=schedule)
            operators.append((f"precond-m{m}", vcycle_apply(sys_, comp, cfg, sys_.matrix())))
        results = []
        for tag, op in operators:
            boundary = fov_boundary(op, args.fov_angles)
            eigs = eigenvalues(op)
            results.append((tag, boundary, eigs))
    except SingularMatrixError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    lines = ["operator,kind,angle,re,im"]
    payload = {"n": args.n, "eta": args.eta, "gamma": args.gamma,
               "seed": args.seed, "operators": []}
    for tag, boundary, eigs in results:
        for theta, point in zip(boundary.angles, boundary.points):
            lines.append(f"{tag},fov,{_fmt(theta)},{_fmt(point.real)},{_fmt(point.imag)}")
        for z in eigs:
            lines.append(f"{tag},eigenvalue,,{_fmt(z.real)},{_fmt(z.imag)}")
        lines.append(f"{tag},radius,,{_fmt(boundary.numerical_radius())},")
        payload["operators"].append({
            "tag": tag,
            "fov": [[t, p.real, p.imag] for t, p in zip(boundary.angles, boundary.points)],
            "eigenvalues": [[z.real, z.imag] for z in eigs],
            "numerical_radius": boundary.numerical_radius(),
        })
    _emit(args, lines, payload)
    if args.plot:
        from . import plotting

        plotting.render_fov(results, args.plot)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_common(sub):
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_argument("--out", default=None, help="write the report to this path")
    sub.add_argument("--plot", default=None, help="render a figure to this path")


def _add_schedule_flags(sub):
    sub.add_argument("--m", type=int, default=None,
                     help="smoothing steps (default 1; lists infer it)")
    sub.add_argument("--schedule", choices=("theorem", "constant", "list"),
                     default="theorem")
    sub.add_argument("--alpha", type=float, action="append",
                     help="relaxation parameter (repeatable)")


def _add_coarse_flags(sub):
    sub.add_argument("--coarse", choices=("direct", "recursive"), default="direct")
    sub.add_argument("--coarse-threshold", dest="coarse_threshold", type=int, default=8)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twogrid",
        description="Two-level preconditioning experiments with clustered spectra.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p_sched = subs.add_parser("schedule", help="closed-form relaxation parameters")
    p_sched.add_argument("--m", type=int, required=True)
    _add_common(p_sched)
    p_sched.set_defaults(func=cmd_schedule)

    p_resp = subs.add_parser("respond", help="scalar response over a lambda grid")
    _add_schedule_flags(p_resp)
    p_resp.add_argument("--lam", type=_parse_complex, action="append",
                        help="explicit coupling eigenvalue (repeatable)")
    p_resp.add_argument("--grid-points", dest="grid_points", type=int, default=64)
    p_resp.add_argument("--grid-radius", dest="grid_radius", type=float, default=4.0)
    _add_common(p_resp)
    p_resp.set_defaults(func=cmd_respond)

    p_clu = subs.add_parser("cluster", help="preconditioned spectrum report")
    p_clu.add_argument("--problem", required=True,
                       choices=("random-block", "fd1d", "fd2d", "sipg",
                                "dg-stencil", "nonnormal"))
    _add_schedule_flags(p_clu)
    p_clu.add_argument("--N", type=int, default=16)
    p_clu.add_argument("--n1", type=int, default=24)
    p_clu.add_argument("--n2", type=int, default=16)
    p_clu.add_argument("--n", type=int, default=64)
    p_clu.add_argument("--elements", type=int, default=8)
    p_clu.add_argument("--delta", type=float, default=2.0)
    p_clu.add_argument("--dg-kind", dest="dg_kind",
                       choices=("element", "interface"), default="element")
    p_clu.add_argument("--eta", type=float, default=1.0)
    p_clu.add_argument("--gamma", type=float, default=0.5)
    p_clu.add_argument("--seed", type=int, default=0)
    p_clu.add_argument("--components", choices=("exact", "transfer"), default="exact")
    p_clu.add_argument("--smoother", choices=("block-exact", "jacobi-diag"),
                       default="block-exact")
    p_clu.add_argument("--transfers", choices=("ideal", "tensor"), default="ideal")
    p_clu.add_argument("--refine", action="store_true",
                       help="polish eigenvalues in extended precision")
    _add_coarse_flags(p_clu)
    _add_common(p_clu)
    p_clu.set_defaults(func=cmd_cluster)

    p_sweep = subs.add_parser("sweep-rho",
                              help="spectral radius sweep over schedules")
    p_sweep.add_argument("--N", type=int, default=16)
    p_sweep.add_argument("--m-max", dest="m_max", type=int, default=6)
    _add_common(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep_rho)

    p_fov = subs.add_parser("fov", help="field of values of B and the "
                                        "preconditioned operators")
    p_fov.add_argument("--n", type=int, default=64)
    p_fov.add_argument("--eta", type=float, default=1.0)
    p_fov.add_argument("--gamma", type=float, default=0.5)
    p_fov.add_argument("--seed", type=int, default=42)
    p_fov.add_argument("--m", type=int, action="append",
                       help="smoothing count (repeatable, default 1 2 3)")
    p_fov.add_argument("--fov-angles", dest="fov_angles", type=int, default=256)
    _add_coarse_flags(p_fov)
    p_fov.set_defaults(coarse="recursive")
    _add_common(p_fov)
    p_fov.set_defaults(func=cmd_fov)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:  # pragma: no cover
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
