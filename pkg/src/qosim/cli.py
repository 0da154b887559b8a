"""Command line front end.

Each subcommand runs one of the model systems and writes its observables as
CSV (canonical, full precision) or as an SVG plot. ``bench`` times master
equation runs with sparse and dense Hamiltonians.

Exit codes: 0 success, 2 bad arguments, 3 integration failure.
"""

from __future__ import annotations

import argparse
import io
import math
import statistics
import sys
import time
from dataclasses import dataclass

import numpy as np

from .dynamics import IntegratorConfig, master, master_dynamic, mcwf, mcwf_ensemble, schroedinger_dynamic
from .errors import IntegrationError
from .models import CavityCooling, GrossPitaevskii, JaynesCummings, time_grid
from .operators import (
    dagger,
    destroy,
    expect,
    identity_op,
    momentum,
    position,
    sigmam,
    tensor_op,
    to_dense,
    transform,
)
from .semiclassical import sc_master_dynamic
from .bases import fock_basis, momentum_basis_from, position_basis, spin_basis
from .states import coherent_state, gaussian_state, spin_down, tensor_state

EXIT_OK, EXIT_USAGE, EXIT_INTEGRATION = 0, 2, 3

JC_SRC = "QuantumOptics.jl Jaynes-Cummings example"
LOSSY_SRC = "QuantumOptics.jl lossy Jaynes-Cummings example"
GPE_SRC = "QuantumOptics.jl Gross-Pitaevskii example"
COOL_SRC = "QuantumOptics.jl cavity cooling example"


@dataclass(frozen=True)
class Param:
    name: str
    type: type
    default: object
    help: str
    source: str


JC_PARAMS = [
    Param("g", float, 1.0, "atom-cavity coupling", JC_SRC),
    Param("delta", float, -0.1, "cavity-atom detuning", JC_SRC),
    Param("alpha", float, 4.0, "coherent amplitude of the initial field", JC_SRC),
    Param("cutoff", int, 40, "Fock space cutoff", JC_SRC),
    Param("t-end", float, 35.0, "final time", JC_SRC),
    Param("dt", float, 0.01, "output spacing", JC_SRC),
]
LOSS_PARAMS = [
    Param("kappa", float, 0.01, "cavity decay rate", LOSSY_SRC),
    Param("gamma", float, 0.01, "spontaneous emission rate", LOSSY_SRC),
    Param("n-th", float, 0.75, "thermal photon number", LOSSY_SRC),
]
GPE_PARAMS = [
    Param("g", float, -3.33, "interaction strength", GPE_SRC),
    Param("mass", float, 1.0, "particle mass", GPE_SRC),
    Param("x-min", float, -10.0, "left end of the grid", GPE_SRC),
    Param("x-max", float, 10.0, "right end of the grid (excluded)", GPE_SRC),
    Param("n-points", int, 300, "number of grid points", GPE_SRC),
    Param("x0", float, 2 * math.pi, "initial packet displacement", GPE_SRC),
    Param("p0", float, 2.0, "initial packet momentum", GPE_SRC),
    Param("sigma", float, 1.5, "packet width", GPE_SRC),
    Param("packets", int, 2, "1 for a single packet at -x0, 2 for the colliding pair", "two packets as in the " + GPE_SRC),
    Param("t-end", float, 6.0, "final time", GPE_SRC),
    Param("dt", float, 0.01, "output spacing", GPE_SRC),
]
COOL_PARAMS = [
    Param("kappa", float, 1.0, "cavity decay rate", COOL_SRC),
    Param("eta", float, 1.0, "cavity pump strength", COOL_SRC),
    Param("g", float, 0.5, "atom-cavity coupling", COOL_SRC),
    Param("gamma", float, 2.0, "spontaneous emission rate", COOL_SRC),
    Param("delta-c", float, 0.0, "cavity detuning from the pump", COOL_SRC),
    Param("delta-a", float, -1.0, "atom detuning from the pump", COOL_SRC),
    Param("mass", float, 3.33, "atom mass", COOL_SRC),
    Param("k", float, 1.0, "cavity wave number", "scaled units of the " + COOL_SRC),
    Param("cutoff", int, 16, "Fock space cutoff", COOL_SRC),
    Param("x0", float, -2 * math.pi, "initial atom position", COOL_SRC),
    Param("p0", float, None, "initial atom momentum, 2 * mass if omitted", COOL_SRC),
    Param("t-end", float, 100.0, "final time", COOL_SRC),
    Param("dt", float, 0.1, "output spacing", COOL_SRC),
]

MODELS = {
    "jc": ("closed Jaynes-Cummings collapse and revival", JC_PARAMS),
    "jc-lossy": ("Jaynes-Cummings master equation with cavity and atomic loss", JC_PARAMS + LOSS_PARAMS),
    "jc-mcwf": ("one quantum-jump trajectory (or an ensemble) next to the master equation",
                JC_PARAMS + LOSS_PARAMS),
    "jc-timedep": ("lossy Jaynes-Cummings in the frame rotating at the detuning", JC_PARAMS + LOSS_PARAMS),
    "gpe": ("1-D Gross-Pitaevskii equation, density on the grid", GPE_PARAMS),
    "cooling": ("semiclassical cavity cooling of a moving atom", COOL_PARAMS),
}

BENCH_SUITES = ("cavity-decay", "jc-master", "particle-master")


class UsageError(Exception):
    pass


def _positive(kind):
    def parse(text):
        value = kind(text)
        if not value > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return value
    return parse


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default="-", help="output file, '-' for stdout")
    p.add_argument("--format", choices=("csv", "svg"), default="csv", help="output format")
    p.add_argument("--rel-tol", type=_positive(float), default=1e-6, help="integrator relative tolerance")
    p.add_argument("--abs-tol", type=_positive(float), default=1e-8, help="integrator absolute tolerance")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qosim", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="model", required=True, metavar="model")
    for name, (summary, params) in MODELS.items():
        p = sub.add_parser(name, help=summary, description=summary,
                           formatter_class=argparse.ArgumentDefaultsHelpFormatter)
        for prm in params:
            p.add_argument(f"--{prm.name}", type=prm.type, default=prm.default,
                           help=f"{prm.help} [{prm.source}]")
        _add_common(p)
        if name == "jc-mcwf":
            p.add_argument("--seed", type=int, default=2, help=f"trajectory seed [{LOSSY_SRC}]")
            p.add_argument("--ntraj", type=_positive(int), default=None,
                           help="average this many trajectories (seeds seed, seed+1, ...)")
            p.add_argument("--n-jobs", type=int, default=1, help="worker processes for --ntraj")
    p = sub.add_parser("bench", help="time sparse vs dense Hamiltonians in the master equation",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--suite", nargs="+", choices=BENCH_SUITES, default=list(BENCH_SUITES))
    p.add_argument("--reps", type=_positive(int), default=3, help="repetitions per case; the median is reported")
    p.add_argument("--sizes", type=_positive(int), nargs="+", default=[32, 64, 128],
                   help="approximate Hilbert space dimensions")
    p.add_argument("--t-end", type=_positive(float), default=1.0, help="length of each timed run")
    p.add_argument("--out", default="-", help="CSV report, '-' for stdout")
    p.add_argument("--rel-tol", type=_positive(float), default=1e-6)
    p.add_argument("--abs-tol", type=_positive(float), default=1e-8)
    return parser


def _kw(args, params) -> dict:
    return {prm.name.replace("-", "_"): getattr(args, prm.name.replace("-", "_")) for prm in params}


def _jc(kw) -> JaynesCummings:
    if kw["cutoff"] < 1:
        raise UsageError("cutoff must be at least 1")
    return JaynesCummings(g=kw["g"], delta=kw["delta"], alpha=kw["alpha"], cutoff=kw["cutoff"])


def _times(kw):
    if not (kw["t_end"] > 0 and kw["dt"] > 0):
        raise UsageError("t-end and dt must be positive")
    return time_grid(kw["t_end"], kw["dt"])


def _rates(kw):
    if min(kw["kappa"], kw["gamma"], kw["n_th"]) < 0:
        raise UsageError("kappa, gamma and n-th must be nonnegative")


def run_model(model: str, kw: dict, config: IntegratorConfig, extra: dict | None = None):
    """Run one model and return ``(times, {column: values})``."""
    extra = extra or {}
    if model in ("jc", "jc-lossy", "jc-mcwf", "jc-timedep"):
        m = _jc(kw)
        T = _times(kw)

        def exc(t, state):
            return expect(m.excitation, state).real

        if model == "jc":
            from .dynamics import schroedinger
            return T, {"excitation": schroedinger(T, m.psi0, m.H, config, fout=exc).states}
        _rates(kw)
        J, R = m.lossy(kw["kappa"], kw["gamma"], kw["n_th"])
        if model == "jc-lossy":
            return T, {"excitation": master(T, m.psi0, m.H, J, R, config, fout=exc).states}
        if model == "jc-timedep":
            return T, {"excitation": master_dynamic(T, m.psi0, m.rotating_frame(J), R, config, fout=exc).states}
        ref = master(T, m.psi0, m.H, J, R, config, fout=exc).states
        if extra.get("ntraj") is None:
            traj = mcwf(T, m.psi0, m.H, J, R, seed=extra["seed"], config=config, fout=exc).states
            return T, {"excitation_trajectory": traj, "excitation_master": ref}
        ens = mcwf_ensemble(T, m.psi0, m.H, J, R, n_traj=extra["ntraj"], base_seed=extra["seed"],
                            config=config, e_ops=[m.excitation], n_jobs=extra.get("n_jobs", 1))
        return T, {"excitation_trajectory": ens.mean[0].real, "excitation_master": ref,
                   "excitation_stderr": ens.stderr[0]}
    if model == "gpe":
        if kw["packets"] not in (1, 2):
            raise UsageError("packets must be 1 or 2")
        if kw["n_points"] < 2 or not kw["x_max"] > kw["x_min"] or not kw["sigma"] > 0 or not kw["mass"] > 0:
            raise UsageError("need n-points >= 2, x-max > x-min and positive sigma and mass")
        T = _times(kw)
        gp = GrossPitaevskii(**{k: v for k, v in kw.items() if k not in ("packets", "t_end", "dt")})
        psi0 = gp.two_packets() if kw["packets"] == 2 else gp.one_packet()
        dens = schroedinger_dynamic(T, psi0, gp.hamiltonian, config,
                                    fout=lambda t, psi: np.abs(psi.data) ** 2).states
        dens = np.array(dens)
        return T, {f"density_{j}": dens[:, j] for j in range(dens.shape[1])}
    if model == "cooling":
        if kw["cutoff"] < 1 or not kw["mass"] > 0:
            raise UsageError("need cutoff >= 1 and positive mass")
        if min(kw["kappa"], kw["gamma"]) < 0:
            raise UsageError("rates must be nonnegative")
        T = _times(kw)
        cc = CavityCooling(**{k: v for k, v in kw.items() if k not in ("t_end", "dt")})

        def obs(t, s):
            return s.classical[0].real, s.classical[1].real, expect(cc.photons, s).real

        rows = np.array(sc_master_dynamic(T, cc.state0, cc.f_q, cc.f_cl, config=config, fout=obs).states)
        return T, {"x": rows[:, 0], "p": rows[:, 1], "n": rows[:, 2], "Ekin": cc.kinetic_energy(rows[:, 1])}
    raise UsageError(f"unknown model {model!r}")


def format_csv(times, columns: dict) -> str:
    """Header row plus one ``%.17g`` row per time, LF line endings."""
    buf = io.StringIO()
    data = np.column_stack([np.asarray(times, dtype=float)] + [np.asarray(v, dtype=float) for v in columns.values()])
    np.savetxt(buf, data, fmt="%.17g", delimiter=",", header=",".join(["t", *columns]),
               comments="", newline="\n")
    return buf.getvalue()


def read_csv(path):
    """Parse a file written by :func:`format_csv` into ``(header, array)``."""
    with open(path, encoding="utf-8", newline="") as fh:
        header = fh.readline().rstrip("\n").split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return header, data


def write_svg(path, model, times, columns: dict) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4))
    if model == "gpe":
        dens = np.column_stack(list(columns.values()))
        ax.imshow(dens.T, aspect="auto", origin="lower", extent=(times[0], times[-1], 0, dens.shape[1]))
        ax.set_ylabel("grid index")
    else:
        for name, values in columns.items():
            ax.plot(times, values, label=name)
        ax.legend()
    ax.set_xlabel("t")
    ax.set_title(model)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _emit(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


# benchmarks

def _bench_systems(case: str, size: int):
    """Return ``(H, J, rates, rho0)`` for a benchmark case near dimension ``size``."""
    if case == "cavity-decay":
        b = fock_basis(max(size - 1, 1))
        a = destroy(b)
        H = 0.5 * dagger(a) * a + 0.8 * (a + dagger(a))
        return H, [a], [1.0], coherent_state(b, 1.0)
    if case == "jc-master":
        bc = fock_basis(max(size // 2 - 1, 1))
        ba = spin_basis(0.5)
        a = tensor_op([destroy(bc), identity_op(ba)])
        sm = tensor_op([identity_op(bc), sigmam(ba)])
        H = -0.1 * dagger(a) * a + dagger(a) * sm + dagger(sm) * a
        psi0 = tensor_state([coherent_state(bc, math.sqrt(size) / 4), spin_down(ba)])
        return H, [a, sm], [0.1, 0.1], psi0
    if case == "particle-master":
        bx = position_basis(-10, 10, size)
        bp = momentum_basis_from(bx)
        x = position(bx)
        p = transform(bx, bp) * momentum(bp) * transform(bp, bx)
        H = to_dense(p * p / 2 + x * x / 2)
        ann = to_dense((x + 1j * p) / math.sqrt(2))
        return H, [ann], [0.1], gaussian_state(bx, 1.0, 0.0, 1.0)
    raise ValueError(case)


def run_bench(suites, reps: int, sizes, t_end: float, config: IntegratorConfig) -> list[dict]:
    from .operators import SparseOperator, to_sparse

    rows = []
    T = np.linspace(0.0, t_end, 11)
    for case in suites:
        for size in sizes:
            H, J, R, psi0 = _bench_systems(case, size)
            reprs = {"dense-H": (to_dense(H), [to_dense(j) for j in J])}
            if case != "particle-master":
                reprs["sparse-H"] = (to_sparse(H), [to_sparse(j) for j in J])
            for rep_name, (Hr, Jr) in reprs.items():
                assert rep_name == "dense-H" or isinstance(Hr, SparseOperator)
                times = []
                for _ in range(reps):
                    start = time.perf_counter()
                    master(T, psi0, Hr, Jr, R, config, fout=lambda t, r: None)
                    times.append(time.perf_counter() - start)
                rows.append({"case": case, "representation": rep_name, "dimension": H.shape[0],
                             "reps": reps, "median_seconds": statistics.median(times)})
    return rows


def format_bench(rows) -> str:
    lines = ["case,representation,dimension,reps,median_seconds"]
    for r in rows:
        lines.append(f"{r['case']},{r['representation']},{r['dimension']},{r['reps']},{r['median_seconds']:.6g}")
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    config = IntegratorConfig(rel_tol=args.rel_tol, abs_tol=args.abs_tol)
    try:
        if args.model == "bench":
            rows = run_bench(args.suite, args.reps, args.sizes, args.t_end, config)
            _emit(format_bench(rows), args.out)
            return EXIT_OK
        kw = _kw(args, MODELS[args.model][1])
        extra = {}
        if args.model == "jc-mcwf":
            extra = {"seed": args.seed, "ntraj": args.ntraj, "n_jobs": args.n_jobs}
        if args.format == "svg" and args.out == "-":
            raise UsageError("--format svg needs --out PATH")
        times, columns = run_model(args.model, kw, config, extra)
    except UsageError as exc:
        print(f"qosim {args.model}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IntegrationError as exc:
        print(f"qosim {args.model}: integration failed after t = {exc.last_time}: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    if args.format == "svg":
        write_svg(args.out, args.model, times, columns)
    else:
        _emit(format_csv(times, columns), args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
