"""Command-line batch runner: ``lagscat {families,evolve,waveop,relations}``.

Settings come from an optional JSON file (``--config``); explicit flags win
over file fields, which win over built-in defaults. Output goes to ``--out``,
else ``$LAGSCAT_OUT``, else ``./lagscat_out``.

Exit codes: 0 success, 1 numerical failure or invalid result, 2 usage error.
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

from . import export
from .asympt import compare_with_asymptotics, envelope_fit, universal_relation_check
from .errors import (
    DiscretizationError,
    NumericalFailure,
    TruncationError,
    UndefinedProfileError,
)
from .evolution import WavePacketSpec, choose_truncation, evolve, prepare_state
from .operator_core import (
    BIRTH_DEATH,
    CLASSICAL_FAMILIES,
    CUSTOM_PERTURBED,
    FAMILIES,
    FREE_CHEBYSHEV,
    HERMITE,
    JACOBI_AB,
    LAGUERRE,
    CoefficientModel,
)
from .orthopoly import amplitude_phase
from .scattering import (
    CONVERGING,
    perturbed_wave_probe,
    scattering_phase,
    wave_limit_probe,
)

ENV_OUT = "LAGSCAT_OUT"
DEFAULT_OUT = "lagscat_out"

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


FAMILY_TEXT = {
    LAGUERRE: [
        "a_n = sqrt((n+1)(n+1+p))",
        "b_n = 2n+p+1",
        "weight = lam^p exp(-lam) / Gamma(p+1) on (0, inf)",
        "r = 1/4, s = 1/2",
        "kappa = (1/2) sqrt(Gamma(1+p)/pi) lam^(-p/2-1/4) exp(lam/2)",
        "omega = lam^(-1/2)",
    ],
    HERMITE: [
        "a_n = sqrt((n+1)/2)",
        "b_n = 0",
        "weight = pi^(-1/2) exp(-lam^2) on (-inf, inf)",
        "r = 1/4, s = 1/2",
        "kappa = 2^(-3/4) pi^(-1/4) exp(lam^2/2)",
        "omega = sqrt(2)",
    ],
    JACOBI_AB: [
        "a_n, b_n from the measure (Stieltjes procedure)",
        "weight = k (1-lam)^alpha (1+lam)^beta on (-1, 1)",
        "k = Gamma(alpha+beta+2) / (2^(alpha+beta+1) Gamma(alpha+1) Gamma(beta+1))",
        "r = 0, s = 1",
        "kappa = (2 pi k)^(-1/2) (1-lam)^(-(1+2 alpha)/4) (1+lam)^(-(1+2 beta)/4)",
        "omega = (1-lam^2)^(-1/2)",
    ],
    FREE_CHEBYSHEV: [
        "a_n = 1/2",
        "b_n = 0",
        "weight = (2/pi) sqrt(1-lam^2) on (-1, 1)",
        "r = 0, s = 1",
        "kappa = (2 pi)^(-1/2) (1-lam^2)^(-1/4)",
        "omega = (1-lam^2)^(-1/2)",
    ],
    BIRTH_DEATH: [
        "a_n = n+alpha",
        "b_n = 2n+2alpha-1",
        "weight = none in closed form (compare with Laguerre p = 2(alpha-1))",
    ],
    CUSTOM_PERTURBED: [
        "a_n = base a_n + A_a sgn(n) (n+1)^(-rho_a)",
        "b_n = base b_n + A_b sgn(n) (n+1)^(-rho_b)",
        "weight = none in closed form",
    ],
}


def families_text() -> str:
    lines = []
    for fam in FAMILIES:
        for entry in FAMILY_TEXT[fam]:
            lines.append(f"{fam}: {entry}")
    return "\n".join(lines) + "\n"


@dataclass
class ExperimentConfig:
    model: CoefficientModel
    packet: WavePacketSpec
    times: tuple[float, ...]
    N: int | None = None
    out: Path = Path(DEFAULT_OUT)
    seed: int = 0
    q: float | None = None
    sign: int | None = None
    compare_asymptotic: bool = False
    strict: bool = False
    lam: float | None = None
    extra: dict = field(default_factory=dict)


def _parse_times(text) -> tuple[float, ...]:
    if isinstance(text, (list, tuple)):
        vals = [float(v) for v in text]
    else:
        vals = [float(v) for v in str(text).replace(";", ",").split(",") if v.strip()]
    if not vals:
        raise UsageError("empty time grid")
    if any(not math.isfinite(v) for v in vals):
        raise UsageError("times must be finite")
    if len(vals) > 1 and not (all(b > a for a, b in zip(vals, vals[1:])) or all(b < a for a, b in zip(vals, vals[1:]))):
        raise UsageError("time grid must be strictly monotone")
    return tuple(vals)


def _default_packet(model: CoefficientModel) -> dict:
    fam = model.family
    while fam == CUSTOM_PERTURBED:
        model = model.base
        fam = model.family
    if fam in (LAGUERRE, BIRTH_DEATH):
        return {"center": 1.0, "width": 0.5, "mod": 0.0}
    if fam == HERMITE:
        return {"center": 0.0, "width": 1.0, "mod": 0.0}
    return {"center": 0.5, "width": 0.3, "mod": 0.0}


def _default_times(model: CoefficientModel) -> list[float]:
    fam = model.family
    if fam in (JACOBI_AB, FREE_CHEBYSHEV):
        return [25.0, 50.0, 100.0]
    return [10.0, 20.0, 40.0]


def _model_from_flags(fam: str, args, file_model: dict | None) -> CoefficientModel:
    if fam is None:
        if file_model is not None:
            return CoefficientModel.from_dict(file_model)
        raise UsageError("--family is required (or a model in --config)")
    params = dict((file_model or {}).get("params", {})) if file_model and file_model.get("family") == fam else {}
    for key in ("p", "alpha", "beta"):
        val = getattr(args, key, None)
        if val is not None:
            params[key] = val
    if fam == LAGUERRE:
        params.setdefault("p", 0.0)
    elif fam == JACOBI_AB:
        if "alpha" not in params or "beta" not in params:
            raise UsageError("JacobiAB needs --alpha and --beta")
    elif fam == BIRTH_DEATH:
        params.setdefault("alpha", 1.0)
    elif fam == CUSTOM_PERTURBED:
        if "base" not in params:
            raise UsageError("CustomPerturbed is only available through --config")
    return CoefficientModel.from_dict({"family": fam, "params": params})


def _packet_admissible(model: CoefficientModel, pk: WavePacketSpec) -> None:
    base = model
    while base.family == CUSTOM_PERTURBED:
        base = base.base
    lo, hi = pk.support
    if base.family in (LAGUERRE, BIRTH_DEATH) and not lo > 0:
        raise UsageError(f"packet support [{lo}, {hi}] must lie in (0, inf)")
    if base.family in (JACOBI_AB, FREE_CHEBYSHEV) and not (lo > -1 and hi < 1):
        raise UsageError(f"packet support [{lo}, {hi}] must lie in (-1, 1)")


def build_config(args) -> ExperimentConfig:
    data: dict = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
    fam = getattr(args, "family", None)
    model = _model_from_flags(fam, args, data.get("model"))
    pk = dict(_default_packet(model))
    pk.update({k: v for k, v in (data.get("packet") or {}).items() if k in ("center", "width", "mod")})
    for flag, key in (("center", "center"), ("width", "width"), ("mod", "mod")):
        val = getattr(args, flag, None)
        if val is not None:
            pk[key] = val
    if not pk["width"] > 0:
        raise UsageError("--width must be positive")
    packet = WavePacketSpec(float(pk["center"]), float(pk["width"]), float(pk.get("mod", 0.0)))
    _packet_admissible(model, packet)
    times = getattr(args, "times", None) or data.get("times") or _default_times(model)
    times = _parse_times(times)
    N = getattr(args, "N", None) or data.get("N")
    if N is not None and int(N) < 1:
        raise UsageError("--N must be positive")
    out = getattr(args, "out", None) or data.get("out") or os.environ.get(ENV_OUT) or DEFAULT_OUT
    sign = getattr(args, "sign", None) or data.get("sign")
    if sign is not None:
        sign = int(sign)
        if sign not in (1, -1):
            raise UsageError("--sign must be +1 or -1")
    q = getattr(args, "q", None)
    if q is None:
        q = data.get("q")
    return ExperimentConfig(
        model=model,
        packet=packet,
        times=times,
        N=None if N is None else int(N),
        out=Path(out),
        seed=int(data.get("seed", 0)),
        q=None if q is None else float(q),
        sign=sign,
        compare_asymptotic=bool(getattr(args, "compare_asymptotic", False) or data.get("compare_asymptotic", False)),
        strict=bool(getattr(args, "strict", False) or data.get("strict", False)),
        lam=data.get("lambda"),
    )


def _tag(t: float) -> str:
    return format(t, "g").replace("-", "m")


def cmd_families(out=None) -> int:
    out = out or sys.stdout
    out.write(families_text())
    return EXIT_OK


def cmd_evolve(cfg: ExperimentConfig, out=None) -> int:
    out = out or sys.stdout
    model = cfg.model
    if not model.is_classical:
        raise UsageError(f"evolve prepares states through the spectral transform; {model.label()} has none")
    t_max = max(abs(t) for t in cfg.times)
    N = cfg.N or choose_truncation(model, cfg.packet, t_max)
    f, tail = prepare_state(model, cfg.packet, N, tail_tol=None, return_tail=True)
    entries = []
    all_valid = True
    for t in cfg.times:
        rep = evolve(model, f, t, N, strict=False)
        export.write_state_csv(cfg.out / f"state_t{_tag(t)}.csv", rep.state)
        entry = rep.summary()
        if cfg.compare_asymptotic and t != 0:
            # each time gets its own policy size unless --N pins it
            cmp = compare_with_asymptotics(model, cfg.packet, t, sign=cfg.sign, N=cfg.N)
            entry["asymptotic_error"] = cmp.error
        entries.append(entry)
        all_valid &= rep.valid
    ratios = [b["n_hi"] / a["n_hi"] if a["n_hi"] > 0 else None for a, b in zip(entries[:-1], entries[1:])]
    summary = {
        "model": model.to_dict(),
        "packet": {"center": cfg.packet.center, "width": cfg.packet.half_width, "mod": cfg.packet.modulation},
        "N": N,
        "prepare_tail": tail,
        "seed": cfg.seed,
        "reports": entries,
        "concentration_ratios": ratios,
        "all_valid": all_valid,
    }
    if cfg.compare_asymptotic:
        ts = [e["t"] for e in entries if "asymptotic_error" in e]
        errs = [e["asymptotic_error"] for e in entries if "asymptotic_error" in e]
        export.write_probe_csv(cfg.out / "asymptotic_errors.csv", ts, errs)
        summary["asymptotic_errors_decreasing"] = all(b < a for a, b in zip(errs[:-1], errs[1:]))
    export.write_json(cfg.out / "summary.json", summary)
    out.write(f"evolve: {len(entries)} states written to {cfg.out}\n")
    if cfg.strict and not all_valid:
        out.write("evolve: some reports failed the leakage/norm checks\n")
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_waveop(cfg: ExperimentConfig, out=None) -> int:
    out = out or sys.stdout
    model = cfg.model
    ts = cfg.times
    record: dict
    if model.family == LAGUERRE:
        if cfg.q is None:
            raise UsageError("waveop on Laguerre needs --q")
        p, q = model.p, cfg.q
        probe = wave_limit_probe(p, q, cfg.packet, ts, cfg.sign, N=cfg.N)
        sign = probe.extra["sign"]
        record = {
            "kind": "closed-form",
            "p": p,
            "q": q,
            "closed_form_phase": complex(np.exp(1j * sign * (q - p) * math.pi / 2)),
            "scattering_phase": scattering_phase(p, q),
        }
    elif model.family in (BIRTH_DEATH, CUSTOM_PERTURBED):
        base = CoefficientModel.laguerre(2 * (model.alpha - 1)) if model.family == BIRTH_DEATH else model.base
        if not base.is_classical:
            raise UsageError("the unperturbed model must be a classical family")
        probe = perturbed_wave_probe(base, model, cfg.packet, ts, cfg.sign, N=cfg.N)
        sign = probe.extra["sign"]
        record = {"kind": "perturbed", "base": base.to_dict(), "tilde": model.to_dict()}
    else:
        raise UsageError(f"waveop supports Laguerre pairs and perturbed models, not {model.label()}")
    export.write_probe_csv(cfg.out / "probe.csv", probe.times, probe.errors)
    record.update({
        "verdict": probe.verdict,
        "times": list(probe.times),
        "errors": list(probe.errors),
        "N": probe.N,
        "sign": sign,
        "max_leakage": probe.max_leakage,
    })
    export.write_json(cfg.out / "verdict.json", record)
    out.write(f"waveop: verdict {probe.verdict}\n")
    if cfg.strict and probe.verdict != CONVERGING:
        return EXIT_NUMERIC
    return EXIT_OK


RELATION_GRIDS = {
    LAGUERRE: (0.1, 10.0),
    HERMITE: (-3.0, 3.0),
    JACOBI_AB: (0.01, 0.99),
    FREE_CHEBYSHEV: (0.01, 0.99),
}
FIT_POINTS = {LAGUERRE: 1.0, HERMITE: 0.0, JACOBI_AB: 0.4, FREE_CHEBYSHEV: 0.0}


def cmd_relations(cfg: ExperimentConfig, out=None, *, window=(2000, 8000)) -> int:
    out = out or sys.stdout
    model = cfg.model
    if model.family not in CLASSICAL_FAMILIES:
        raise UsageError(f"relations need a classical family, got {model.label()}")
    lo, hi = RELATION_GRIDS[model.family]
    grid = np.linspace(lo, hi, 101)
    r1, r2 = universal_relation_check(model, grid)
    lam = FIT_POINTS[model.family] if cfg.lam is None else float(cfg.lam)
    fit = envelope_fit(model, lam, window)
    dev = fit.deviations(model, lam)
    prof = amplitude_phase(model)
    ok = max(r1, r2) <= 1e-10 and dev["kappa_rel"] <= 0.05 and dev["omega_rel"] <= 0.05 and dev["r_abs"] <= 0.05
    export.write_json(cfg.out / "relations.json", {
        "model": model.to_dict(),
        "residual_2r_plus_s_minus_1": r1,
        "residual_2pi_tau_kappa2_minus_s_omega": r2,
        "fit_lambda": lam,
        "fit_window": list(window),
        "fit": {"kappa": fit.kappa, "omega": fit.omega, "r": fit.r, "s": fit.s},
        "closed_form": {"kappa": float(prof.kappa(lam)), "omega": float(prof.omega(lam)), "r": prof.r, "s": prof.s},
        "deviations": dev,
        "pass": ok,
    })
    out.write(f"relations: residuals {r1:.3e} {r2:.3e}; fit deviations {json.dumps(dev, sort_keys=True)}\n")
    return EXIT_OK if ok else EXIT_NUMERIC


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", help="JSON file with default settings (flags override it)")
    sp.add_argument("--family", choices=FAMILIES)
    sp.add_argument("--p", type=float, help="Laguerre parameter (source operator for waveop)")
    sp.add_argument("--q", type=float, help="Laguerre parameter of the target operator (waveop)")
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--beta", type=float)
    sp.add_argument("--center", type=float, help="packet center c")
    sp.add_argument("--width", type=float, help="packet half-width w")
    sp.add_argument("--mod", type=float, help="packet phase modulation m")
    sp.add_argument("--times", help="comma-separated, strictly monotone time grid")
    sp.add_argument("--N", type=int, help="truncation override")
    sp.add_argument("--sign", type=int, choices=(1, -1), help="wave-operator / propagator branch")
    sp.add_argument("--out", help=f"output directory (default ${ENV_OUT} or ./{DEFAULT_OUT})")
    sp.add_argument("--compare-asymptotic", action="store_true", dest="compare_asymptotic")
    sp.add_argument("--strict", action="store_true", help="exit 1 on invalid reports or inconclusive probes")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lagscat", description="Jacobi-operator evolution and scattering experiments")
    sub = ap.add_subparsers(dest="command")
    sub.add_parser("families", help="list coefficient families and their closed forms")
    for name, text in (("evolve", "evolve a packet and write states"),
                       ("waveop", "wave-operator convergence probe"),
                       ("relations", "amplitude/phase identities and envelope fits")):
        _add_common(sub.add_parser(name, help=text))
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    if args.command in (None, "families"):
        return cmd_families()
    try:
        cfg = build_config(args)
        cmd = {"evolve": cmd_evolve, "waveop": cmd_waveop, "relations": cmd_relations}[args.command]
        return cmd(cfg)
    except (NumericalFailure, TruncationError, DiscretizationError, UndefinedProfileError) as exc:
        sys.stderr.write(f"lagscat: {exc}\n")
        return EXIT_NUMERIC
    except (UsageError, ValueError) as exc:
        sys.stderr.write(f"lagscat: usage error: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        sys.stderr.write(f"lagscat: cannot write output: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
