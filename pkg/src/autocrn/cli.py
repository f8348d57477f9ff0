"""Command-line front end: ``autocrn <subcommand> ...``.

Exit codes are 0 on success, 1 for invalid input (including an unknown
subcommand or a network that is not autocatalytic) and 2 for failures of
the computation itself.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io as crn_io
from .classify import (
    AutocatalyticProfile,
    ViolationList,
    build_asip_network,
    build_inclusion_network,
    classify_autocatalytic,
)
from .condensation import condensation_curve
from .errors import CRNError, NetworkFormatError, NotAutocatalytic
from .library import resolve_network
from .network import ReactionNetwork, structural_summary
from .oracle import exact_stationary, generalized_balance_residual, master_equation_residual, parse_partition
from .productform import (
    CondensationQuery,
    build_table,
    classify_factor,
    factor_ratio,
    marginal,
    scaled_profile,
    stationary_distribution,
)
from .simulate import empirical_stationary, empirical_stationary_batch, simulate
from .states import total_variation

__all__ = ["CommandResult", "run", "main"]


@dataclass
class CommandResult:
    exit_code: int
    artifacts: list[str] = field(default_factory=list)


class UsageError(Exception):
    pass


class ValidationError(Exception):
    """Input rejected before any computation; the message is printed verbatim."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _to_json(obj, indent: int = 2, level: int = 0) -> str:
    """JSON text with floats at 17 significant digits; non-finite floats become strings."""
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return format(v, ".17g") if math.isfinite(v) else json.dumps(str(v))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_to_json(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(_to_json(v) for v in obj) + "]"
        items = [pad + _to_json(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _emit(obj) -> None:
    print(_to_json(obj))


def _workers() -> int:
    env = os.environ.get("CRN_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValidationError(f"CRN_THREADS must be an integer, got {env!r}") from None
        if n < 1:
            raise ValidationError("CRN_THREADS must be at least 1")
        return n
    return os.cpu_count() or 1


def _total(n: int) -> int:
    if n < 0:
        raise ValidationError(f"NonNegativeTotalRequired: total must be >= 0, got {n}")
    return n


def _profile(net: ReactionNetwork) -> AutocatalyticProfile:
    res = classify_autocatalytic(net)
    if isinstance(res, ViolationList):
        raise NotAutocatalytic(res)
    return res


def _species(net: ReactionNetwork, name: str) -> int:
    try:
        return net.index(name)
    except (KeyError, ValueError):
        raise ValidationError(f"unknown species {name!r}") from None


# ---------------------------------------------------------------- commands


def cmd_analyze(a, out):
    net = resolve_network(a.network)
    _emit(structural_summary(net).to_dict(net.species))
    return 0


def _builder_network(a) -> ReactionNetwork:
    if a.builder == "inclusion":
        if a.sites is None or a.p is None:
            raise ValidationError("--builder inclusion needs --sites and --p")
        mat = np.full((a.sites, a.sites), a.p)
        np.fill_diagonal(mat, 0.0)
        return build_inclusion_network(mat, a.m)
    if a.sites is None or a.p is None or a.q is None:
        raise ValidationError("--builder asip needs --sites, --p and --q")
    return build_asip_network(a.sites, a.p, a.q, a.m)


def cmd_classify(a, out):
    if (a.network is None) == (a.builder is None):
        raise ValidationError("give either a network or --builder")
    net = resolve_network(a.network) if a.network else _builder_network(a)
    res = classify_autocatalytic(net)
    if isinstance(res, ViolationList):
        _emit(res.to_dict())
        return 1
    _emit(res.to_dict())
    return 0


def cmd_stationary(a, out):
    N = _total(a.total)
    net = resolve_network(a.network)
    profile = _profile(net)
    if a.volume is not None:
        if not a.volume > 0:
            raise ValidationError("--volume must be positive")
        profile = scaled_profile(profile, a.volume)
    if a.marginals:
        table = build_table(profile, N)
        text = crn_io.marginals_csv([marginal(table, i) for i in range(net.n_species)], net.species)
    else:
        text = crn_io.joint_csv(stationary_distribution(profile, N))
    out.append(str(crn_io.atomic_write(a.out, text)))
    return 0


def cmd_oracle(a, out):
    N = _total(a.total)
    net = resolve_network(a.network)
    dist = exact_stationary(net, N)
    out.append(str(crn_io.atomic_write(a.out, crn_io.joint_csv(dist))))
    return 0


def cmd_verify(a, out):
    N = _total(a.total)
    net = resolve_network(a.network)
    tv = total_variation(stationary_distribution(_profile(net), N), exact_stationary(net, N))
    ok = tv <= a.tol
    _emit({"total": N, "tv": tv, "tol": a.tol, "pass": ok})
    return 0 if ok else 1


def _parse_init(spec: str, net: ReactionNetwork, N: int) -> tuple[int, ...]:
    """``"15,0"`` or ``"S1=15"`` (unnamed species start at 0)."""
    try:
        if "=" in spec:
            x = [0] * net.n_species
            for part in spec.split(","):
                name, val = part.split("=")
                x[_species(net, name.strip())] = int(val)
        else:
            x = [int(v) for v in spec.split(",")]
    except ValueError:
        raise ValidationError(f"cannot parse --init {spec!r}") from None
    if len(x) != net.n_species or min(x) < 0:
        raise ValidationError("--init needs one non-negative count per species")
    if sum(x) != N:
        raise ValidationError(f"--init sums to {sum(x)}, expected --total {N}")
    return tuple(x)


def cmd_simulate(a, out):
    N = _total(a.total)
    net = resolve_network(a.network)
    x0 = _parse_init(a.init, net, N)
    if not 0 <= a.burn_in < a.t_max:
        raise ValidationError("need 0 <= --burn-in < --t-max")
    if a.runs == 1:
        dist = empirical_stationary(net, x0, a.t_max, a.burn_in, a.seed)
    else:
        dist = empirical_stationary_batch(net, x0, a.t_max, a.burn_in, a.seed, a.runs, _workers())
    out.append(str(crn_io.atomic_write(a.out, crn_io.joint_csv(dist))))
    if a.trajectory:
        traj = simulate(net, x0, a.t_max, a.seed)
        out.append(str(crn_io.atomic_write(a.trajectory, crn_io.trajectory_csv(traj))))
    return 0


def cmd_condense(a, out):
    net = resolve_network(a.network)
    profile = _profile(net)
    if a.n_min < 0 or a.n_step < 1 or a.n_max < a.n_min:
        raise ValidationError("need 0 <= --n-min <= --n-max and --n-step >= 1")
    target = _species(net, a.target) if a.target else None
    try:
        query = CondensationQuery(a.theta, a.K, target)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None
    if a.K > a.n_min:
        raise ValidationError("--K exceeds --n-min")
    report = condensation_curve(profile, range(a.n_min, a.n_max + 1, a.n_step), query)
    out.append(str(crn_io.atomic_write(a.out, report.to_csv())))
    return 0


def cmd_radius(a, out):
    net = resolve_network(a.network)
    profile = _profile(net)
    i = _species(net, a.species)
    fc = classify_factor(profile, i)
    probes = {str(m): factor_ratio(profile, i, m) for m in (10, 100, 1000)}
    _emit({"species": a.species, "kind": fc.kind, "radius": fc.radius, "ratio_probes": probes})
    return 0


def cmd_balance(a, out):
    N = _total(a.total)
    net = resolve_network(a.network)
    try:
        part = parse_partition(Path(a.partition).read_text(encoding="utf-8"), net)
        dist = crn_io.read_joint_csv(Path(a.dist).read_text(encoding="utf-8"))
    except (OSError, KeyError, ValueError) as exc:
        raise ValidationError(f"cannot read balance inputs: {exc}") from None
    if dist.N != N or dist.n_species != net.n_species:
        raise ValidationError("distribution does not live on the requested state space")
    _emit(
        {
            "total": N,
            "generalized_balance_residual": generalized_balance_residual(net, part, dist),
            "master_equation_residual": master_equation_residual(net, dist),
        }
    )
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="autocrn", description="Autocatalytic reaction network toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def net_cmd(name, help_, func, network=True):
        s = sub.add_parser(name, help=help_)
        if network:
            s.add_argument("network", help="network JSON path or bundled name")
        s.set_defaults(func=func)
        return s

    net_cmd("analyze", "structural report as JSON", cmd_analyze)

    s = net_cmd("classify", "autocatalytic profile or violations", cmd_classify, network=False)
    s.add_argument("network", nargs="?")
    s.add_argument("--builder", choices=["inclusion", "asip"])
    s.add_argument("--sites", type=int)
    s.add_argument("--p", type=float)
    s.add_argument("--q", type=float)
    s.add_argument("--m", type=float, default=2.0)

    s = net_cmd("stationary", "product-form law to CSV", cmd_stationary)
    s.add_argument("--total", type=int, required=True)
    s.add_argument("--volume", type=float)
    s.add_argument("--marginals", action="store_true")
    s.add_argument("--out", required=True)

    s = net_cmd("oracle", "brute-force stationary law to CSV", cmd_oracle)
    s.add_argument("--total", type=int, required=True)
    s.add_argument("--out", required=True)

    s = net_cmd("verify", "compare product form with the brute-force law", cmd_verify)
    s.add_argument("--total", type=int, required=True)
    s.add_argument("--tol", type=float, default=1e-9)

    s = net_cmd("simulate", "time-averaged occupation from simulation", cmd_simulate)
    s.add_argument("--total", type=int, required=True)
    s.add_argument("--init", required=True)
    s.add_argument("--t-max", type=float, required=True)
    s.add_argument("--burn-in", type=float, default=0.0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--runs", type=int, default=1)
    s.add_argument("--out", required=True)
    s.add_argument("--trajectory")

    s = net_cmd("condense", "finite-N condensation report to CSV", cmd_condense)
    s.add_argument("--n-min", type=int, required=True)
    s.add_argument("--n-max", type=int, required=True)
    s.add_argument("--n-step", type=int, default=1)
    s.add_argument("--theta", type=float, default=0.9)
    s.add_argument("--K", type=int, default=0)
    s.add_argument("--target")
    s.add_argument("--out", required=True)

    s = net_cmd("radius", "growth class and radius of one factor", cmd_radius)
    s.add_argument("--species", required=True)

    s = net_cmd("balance", "generalized balance residual of a distribution", cmd_balance)
    s.add_argument("--total", type=int, required=True)
    s.add_argument("--partition", required=True)
    s.add_argument("--dist", required=True)
    return p


def run(argv=None) -> CommandResult:
    artifacts: list[str] = []
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return CommandResult(1)
    except SystemExit as exc:  # --help
        return CommandResult(int(exc.code or 0))
    try:
        code = args.func(args, artifacts)
    except (ValidationError, NetworkFormatError, NotAutocatalytic, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return CommandResult(1)
    except (CRNError, ValueError, ArithmeticError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return CommandResult(2)
    return CommandResult(code, artifacts if code == 0 else [])


def main(argv=None) -> None:
    sys.exit(run(argv).exit_code)


if __name__ == "__main__":
    main()
