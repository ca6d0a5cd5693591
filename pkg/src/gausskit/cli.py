"""Command-line front end: circuit generation, simulation, and sweeps.

Exit codes: 0 success, 2 usage error, 3 circuit parse error, 4 capacity.
Output is plain text and CSV; plotting is left to external tools.
"""
from __future__ import annotations

import concurrent.futures
import csv
import io
import math
import sys

import click
import numpy as np

from . import builders, optimizer, resources, simulator, textio
from .circuit import validate
from .gates import GaussianSpec, ParameterError

CSV_COLUMNS = ["n_qubits", "alpha_or_beta", "delta", "epsilon", "gamma",
               "expected_t_depth", "layer_count", "seed"]

EXIT_PARSE = 3
EXIT_CAPACITY = 4


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _parse_n(value: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in value.split(","))
    except ValueError:
        raise click.BadParameter(f"bad qubit count {value!r}")


@click.group()
def main() -> None:
    """Gaussian state-preparation toolkit."""


@main.command()
@click.option("--family", required=True,
              type=click.Choice(["phase", "exponential", "half-gaussian",
                                 "gaussian", "gaussian2d"]))
@click.option("--n", "n_spec", required=True, help="qubits, e.g. 6 or 3,3")
@click.option("--alpha", type=float, default=None)
@click.option("--beta", type=float, default=None)
@click.option("--d", "degree", type=int, default=1, help="phase polynomial degree")
@click.option("--layered", is_flag=True, help="pack pair windows into rounds")
@click.option("--q", "qform", default="1,0,1",
              help="2-D quadratic form cxx,cxy,cyy")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--seed", type=int, default=0, help="accepted for interface parity")
@click.option("--threads", type=int, default=1, help="accepted for interface parity")
def generate(family, n_spec, alpha, beta, degree, layered, qform, out,
             seed, threads) -> None:
    """Build a circuit and write it in the textual format."""
    ns = _parse_n(n_spec)
    n = ns[0]
    try:
        if beta is not None and alpha is None:
            alpha = GaussianSpec(n_qubits=sum(ns), beta=beta).derived_alpha
        if alpha is None:
            raise click.UsageError("provide --alpha or --beta")
        if family == "phase":
            circuit = builders.build_poly_phase(n, alpha, degree)
        elif family == "exponential":
            circuit = builders.build_exponential(n, alpha)
        elif family == "half-gaussian":
            circuit = builders.build_half_gaussian(n, alpha)
        elif family == "gaussian":
            if layered:
                circuit = builders.layered_full_gaussian(n, alpha).to_circuit()
            else:
                circuit = builders.build_full_gaussian(n, alpha)
        else:
            if len(ns) != 2:
                raise click.UsageError("gaussian2d needs --n nx,ny")
            q = tuple(int(p) for p in qform.split(","))
            circuit = builders.build_gaussian_2d(ns[0], ns[1], q, alpha)
    except ParameterError as exc:
        raise click.UsageError(str(exc))
    problems = validate(circuit)
    if problems:
        _fail(1, "; ".join(problems))
    text = textio.dumps(circuit)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


@main.command()
@click.argument("circuit_file", required=False,
                type=click.Path(exists=True, dir_okay=False))
@click.option("--family",
              type=click.Choice(["phase", "exponential", "half-gaussian",
                                 "gaussian", "gaussian2d"]),
              default=None, help="compare a circuit file against this target")
@click.option("--n", "n_spec", default=None)
@click.option("--d", "degree", type=int, default=1)
@click.option("--q", "qform", default="1,0,1")
@click.option("--alpha", type=float, default=None)
@click.option("--beta", type=float, default=None)
@click.option("--delta", type=float, default=0.0, help="per-gate noise budget")
@click.option("--alloc", type=click.Choice(["uniform", "2to1"]), default="2to1")
@click.option("--order", type=click.Choice(["optimal", "random", "identity"]),
              default="optimal")
@click.option("--ideal", "tail", type=click.Choice(["finite", "infinite"]),
              default="finite",
              help="reference convention for circuit-file comparisons")
@click.option("--seed", type=int, default=0)
@click.option("--threads", type=int, default=1)
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="append one CSV row here")
def simulate(circuit_file, family, n_spec, degree, qform, alpha, beta, delta,
             alloc, order, tail, seed, threads, out) -> None:
    """Simulate a circuit file or a Gaussian spec and report the numbers."""
    try:
        if circuit_file:
            circuit = textio.load(circuit_file)
            state, rep = simulator.simulate_postselected(circuit)
            n_qubits = circuit.data_qubits
            if alpha is None:
                alpha = circuit.alpha
            eps = _file_epsilon(state, family, circuit, degree, qform, tail)
            gamma = rep.subnormalization
            probs = rep.layer_probs
            et = (resources.circuit_t_depth(
                circuit, optimizer.ErrorBudget.two_to_one(delta)
                if alloc == "2to1" else optimizer.ErrorBudget.uniform(delta))
                if delta > 0 else math.nan)
        elif delta == 0.0:
            # noiseless reference run: no budget, so no T-depth figure
            if n_spec is None:
                raise click.UsageError(
                    "give a circuit file or --n with --alpha/--beta")
            n_qubits = _parse_n(n_spec)[0]
            spec = GaussianSpec(n_qubits=n_qubits, alpha=alpha, beta=beta)
            alpha = spec.derived_alpha
            layered = builders.layered_full_gaussian(n_qubits, alpha)
            rep = simulator.run_noisy(
                layered, optimizer.ErrorBudget.two_to_one(0.0), seed=seed)
            eps = rep.l2_error
            et = math.nan
            gamma = rep.subnormalization
            probs = rep.layer_probs
        else:
            if n_spec is None:
                raise click.UsageError(
                    "give a circuit file or --n with --alpha/--beta")
            n_qubits = _parse_n(n_spec)[0]
            spec = GaussianSpec(n_qubits=n_qubits, alpha=alpha, beta=beta,
                                gate_error=delta)
            report = resources.estimate(spec, seed=seed, order=order,
                                        alloc=alloc)
            eps, et = report.l2_error, report.expected_t_depth
            alpha = report.alpha
            gamma = report.subnormalization
            probs = report.layer_probs
    except textio.CircuitParseError as exc:
        _fail(EXIT_PARSE, str(exc))
    except simulator.CapacityError as exc:
        _fail(EXIT_CAPACITY, str(exc))
    except ParameterError as exc:
        raise click.UsageError(str(exc))

    click.echo(f"data qubits:      {n_qubits}")
    click.echo(f"epsilon (L2):     {eps:.6e}")
    click.echo(f"gamma:            {gamma:.12f}")
    click.echo(f"success prob:     {gamma ** 2:.12f}")
    click.echo("layer probs:      " + " ".join(f"{p:.6f}" for p in probs))
    click.echo(f"expected T-depth: {et:.2f}")
    if out:
        row = [n_qubits, alpha, delta, eps, gamma, et, len(probs), seed]
        _append_csv(out, [row])


def _file_epsilon(state, family, circuit, degree, qform, tail) -> float:
    """Error of a simulated circuit file against the requested target."""
    if family is None:
        return math.nan
    n, alpha = circuit.data_qubits, circuit.alpha
    if family == "phase":
        ideal = simulator.ideal_phase_state(n, alpha, degree)
    elif family == "exponential":
        ideal = simulator.ideal_exponential(n, alpha)
    elif family == "half-gaussian":
        ideal = simulator.ideal_half_gaussian(n, alpha, tail=tail)
    elif family == "gaussian":
        ideal = simulator.ideal_gaussian(n, alpha, tail=tail)
    else:
        q = tuple(int(p) for p in qform.split(","))
        half = n // 2
        ideal = simulator.ideal_gaussian_2d(n - half, half, q, alpha)
    return simulator.l2_error(ideal, state.amplitudes)


@main.command()
@click.option("--axis", "axes", multiple=True,
              help="name=min:max:points[:log|lin], name in {delta, alpha, beta, n}")
@click.option("--n", "n_spec", default=None, help="fixed qubit count")
@click.option("--alpha", type=float, default=None)
@click.option("--beta", type=float, default=None)
@click.option("--delta", type=float, default=None)
@click.option("--couple-alpha", is_flag=True,
              help="derive alpha from delta via ||A(1) - XH|| = delta")
@click.option("--alloc", type=click.Choice(["uniform", "2to1"]), default="2to1")
@click.option("--order", type=click.Choice(["optimal", "random", "identity"]),
              default="optimal")
@click.option("--trials", type=int, default=1)
@click.option("--seed", type=int, default=0)
@click.option("--threads", type=int, default=1)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def sweep(axes, n_spec, alpha, beta, delta, couple_alpha, alloc, order,
          trials, seed, threads, out) -> None:
    """Grid sweep writing one CSV row per point per trial."""
    if len(axes) > 2:
        raise click.UsageError("at most two axes (heatmap limit)")
    try:
        grids = [_parse_axis(a) for a in axes]
    except ValueError as exc:
        raise click.UsageError(str(exc))
    if not grids:
        grids = [("delta", np.array([delta if delta is not None else 1e-6]))]
    fixed = {"alpha": alpha, "beta": beta, "delta": delta,
             "n": _parse_n(n_spec)[0] if n_spec else None}

    points = []
    shape = [len(g[1]) for g in grids]
    for flat in range(int(np.prod(shape))):
        coords = np.unravel_index(flat, shape)
        params = dict(fixed)
        for (name, values), c in zip(grids, coords):
            params[name] = float(values[c]) if name != "n" else int(values[c])
        points.append((flat, params))

    def run_point(item):
        flat, params = item
        rows = []
        for trial in range(trials):
            point_seed = (seed ^ flat) + trial
            rows.append(_sweep_row(params, couple_alpha, alloc, order,
                                   point_seed))
        return flat, rows

    try:
        if threads > 1:
            with concurrent.futures.ThreadPoolExecutor(threads) as pool:
                results = list(pool.map(run_point, points))
        else:
            results = [run_point(p) for p in points]
    except simulator.CapacityError as exc:
        _fail(EXIT_CAPACITY, str(exc))
    except ParameterError as exc:
        raise click.UsageError(str(exc))
    results.sort(key=lambda r: r[0])
    all_rows = [row for _, rows in results for row in rows]
    if out:
        _append_csv(out, all_rows, header=True)
    else:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(CSV_COLUMNS)
        writer.writerows(all_rows)
        click.echo(buf.getvalue(), nl=False)


def _sweep_row(params, couple_alpha, alloc, order, point_seed):
    delta = params.get("delta")
    alpha = params.get("alpha")
    beta = params.get("beta")
    n = params.get("n")
    if couple_alpha:
        if delta is None:
            raise ParameterError("--couple-alpha needs a delta value or axis")
        alpha = optimizer.alpha_matching_gate_error(delta)
    if delta is None:
        raise ParameterError("sweep needs a delta value or axis")
    if alpha is None and beta is None:
        raise ParameterError("sweep needs alpha, beta, or --couple-alpha")
    if n is None:
        if alpha is None:
            raise ParameterError("beta sweeps need an explicit --n")
        n = optimizer.qubit_threshold(alpha, delta)
    spec = GaussianSpec(n_qubits=n, alpha=alpha, beta=beta, gate_error=delta)
    report = resources.estimate(spec, seed=point_seed, order=order, alloc=alloc)
    return [report.n_qubits,
            beta if beta is not None else report.alpha,
            report.delta, report.l2_error, report.subnormalization,
            report.expected_t_depth, len(report.layer_probs), point_seed]


def _parse_axis(text: str):
    name, _, rest = text.partition("=")
    parts = rest.split(":")
    if name not in ("delta", "alpha", "beta", "n") or len(parts) not in (3, 4):
        raise ValueError(f"bad axis spec {text!r}")
    lo, hi, points = float(parts[0]), float(parts[1]), int(parts[2])
    scale = parts[3] if len(parts) == 4 else "log"
    if points < 1:
        raise ValueError("axis needs at least one point")
    if points == 1:
        values = np.array([lo])
    elif scale == "log":
        values = np.geomspace(lo, hi, points)
    elif scale == "lin":
        values = np.linspace(lo, hi, points)
    else:
        raise ValueError(f"bad axis scale {scale!r}")
    if name == "n":
        values = np.round(values).astype(int)
    return name, values


def _append_csv(path, rows, header: bool = False) -> None:
    import os

    new_file = not os.path.exists(path)
    with open(path, "a", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if new_file:
            writer.writerow(CSV_COLUMNS)
        writer.writerows(rows)


if __name__ == "__main__":
    main()
