"""``landau-weyl`` command line front end."""
from __future__ import annotations

import argparse
import copy
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import asymptotics as asy
from . import io as lwio
from .errors import ConfigError, EmptyResult, LandauWeylError
from .experiments import count_eigs, h_sweep, lambda_sweep, run_spectrum, smoothed_density, trace_sum
from .model import PotentialKind, Regime, contributing_bands, make_mollifier
from .parallel import resolve_jobs

COMMANDS = ("bands", "spectrum", "count", "trace", "density", "coeffs", "sweep")
METHODS = ("band", "radial", "feshbach")


def _floats(text: str) -> list:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or comma-separated list, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty value list")
    return vals


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="landau-weyl",
                                 description="Weyl asymptotics for perturbed Landau Hamiltonians.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="YAML or JSON run configuration")
        sp.add_argument("--method", choices=METHODS + ("all",))
        sp.add_argument("--h", type=_floats, help="h value, or comma-separated list for sweeps")
        sp.add_argument("--lambda", dest="lam", type=_floats, help="coupling value or list")
        sp.add_argument("--out", help="output file path")
        sp.add_argument("--format", choices=("json", "csv"))
        sp.add_argument("--jobs", type=int, default=1, help="parallel workers (LANDAU_WEYL_JOBS wins)")
        sp.add_argument("--plot", action="store_true", help="also write a PNG next to the output")
    return ap


def apply_overrides(cfg: dict, args) -> dict:
    """Flags win over config entries; the merged config is what gets echoed."""
    cfg = copy.deepcopy(cfg)
    reg = dict(cfg.get("regime") or {})
    if args.h is not None:
        for k in ("h", "h_list", "lambda", "lambda_list"):
            reg.pop(k, None)
        reg["mode"] = "semiclassical"
        reg["h" if len(args.h) == 1 else "h_list"] = args.h[0] if len(args.h) == 1 else args.h
    if args.lam is not None:
        for k in ("h", "h_list", "lambda", "lambda_list"):
            reg.pop(k, None)
        reg["mode"] = "coupling"
        reg["lambda" if len(args.lam) == 1 else "lambda_list"] = args.lam[0] if len(args.lam) == 1 else args.lam
    if reg:
        cfg["regime"] = reg
    if args.method is not None:
        cfg["method"] = args.method
    out = dict(cfg.get("output") or {})
    if args.out is not None:
        out["path"] = args.out
    if args.format is not None:
        out["format"] = args.format
    elif args.out is not None and Path(args.out).suffix.lower() in (".csv", ".json"):
        out["format"] = Path(args.out).suffix.lower()[1:]
    if out:
        out.setdefault("format", "csv" if str(out.get("path", "")).endswith(".csv") else "json")
        cfg["output"] = out
    lwio.validate_config(cfg)
    return cfg


class Run:
    """Resolved objects for one invocation."""

    def __init__(self, cfg: dict, jobs: int):
        self.cfg = cfg
        self.jobs = jobs
        self.window = lwio.build_window(cfg)
        self.pot = lwio.build_potential(cfg, self.window)
        self.numerics = dict(cfg.get("numerics") or {})
        reg = dict(cfg.get("regime") or {})
        default_mode = "coupling" if self.pot.kind is PotentialKind.POWER_TAIL else "semiclassical"
        self.mode = reg.get("mode", default_mode)
        self.reg = reg
        self.delta = reg.get("delta", self.pot.delta)
        self.f = lwio.build_test_function(cfg)
        self.t_grid = lwio.build_t_grid(cfg)
        out = cfg.get("output") or {}
        self.out_path = out.get("path")
        self.out_format = out.get("format", "json")

    def methods(self, allow_all: bool = True) -> list:
        m = self.cfg.get("method")
        if m is None:
            m = "radial" if self.pot.is_radial and self.mode == "semiclassical" else "band"
        if m == "all":
            if not allow_all:
                raise ConfigError("method 'all' is not available for this command")
            return list(METHODS)
        return [m]

    def regime(self) -> Regime:
        if self.mode == "semiclassical":
            h = self.reg.get("h")
            if h is None:
                raise ConfigError("regime.h is required (or pass --h)")
            return Regime.semiclassical(h)
        lam = self.reg.get("lambda")
        if lam is None:
            raise ConfigError("regime.lambda is required (or pass --lambda)")
        if self.delta is None:
            raise ConfigError("coupling regime needs regime.delta or a power-tail potential")
        reg = Regime.coupling(lam, self.delta)
        reg.check_pairing(self.pot)
        return reg

    def bands(self):
        return contributing_bands(self.window, self.pot)

    def predicted_count(self, bands) -> tuple:
        if self.mode == "semiclassical":
            return "C0", asy.C0(self.window, self.pot, bands)
        return "D0", asy.D0(self.window, self.pot)

    def predicted_trace(self, bands) -> tuple:
        if self.mode == "semiclassical":
            return "alpha0", asy.alpha0(self.f, self.pot, bands, rtol=1e-10)
        return "b0", asy.b0(self.f, self.pot)

    def spectra(self) -> dict:
        reg = self.regime()
        bands = self.bands()
        return {m: run_spectrum(m, self.pot, reg, self.window, bands, self.numerics, self.jobs)
                for m in self.methods()}

    def require_f(self):
        if self.f is None:
            raise ConfigError("this command needs a test_function block")


def _g(x) -> str:
    if x is None:
        return "nan"
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.6g}"


def summary(**kv) -> str:
    return " ".join(f"{k}={_g(v)}" for k, v in kv.items())


def _emit(run: Run, result: dict, header: list, rows: list, footer=()):
    if not run.out_path:
        return
    if run.out_format == "csv":
        text = lwio.render_csv(run.cfg, header, rows, footer)
    else:
        text = lwio.render_json(run.cfg, result)
    lwio.atomic_write(run.out_path, text)


def _plot(run: Run, fn, *args):
    if not run.out_path:
        raise ConfigError("--plot needs an output path")
    from . import plotting
    fn_ = getattr(plotting, fn)
    fn_(*args, plotting.png_path(run.out_path))


def cmd_bands(run: Run, plot: bool = False) -> str:
    br = run.bands()
    _emit(run, {"bands": [br.l0, br.l]}, ["l0", "l"], [[br.l0, br.l]])
    return f"bands: {br}"


def cmd_spectrum(run: Run, plot: bool = False) -> str:
    specs = run.spectra()
    if all(len(s.eigenvalues) == 0 for s in specs.values()):
        raise EmptyResult("no eigenvalues in the window")
    rows = []
    for m, s in specs.items():
        for i, (ev, mult, tag) in enumerate(zip(s.eigenvalues, s.multiplicities, s.tags)):
            rows.append([m, i, float(ev), int(mult), tag])
    _emit(run, {"spectra": [s.to_dict() for s in specs.values()]},
          ["method", "index", "eigenvalue", "multiplicity", "band_or_channel"], rows)
    if plot:
        _plot(run, "plot_spectra", specs, run.window)
    first = next(iter(specs.values()))
    return summary(h_eff=first.regime.h_eff, **{f"count_{m}": s.count for m, s in specs.items()})


def cmd_count(run: Run, plot: bool = False) -> str:
    specs = run.spectra()
    bands = run.bands()
    name, pred = run.predicted_count(bands)
    h_eff = next(iter(specs.values())).regime.h_eff
    rows, res = [], {}
    for m, s in specs.items():
        n = count_eigs(s, run.window)
        scaled = h_eff**2 * n
        rows.append([m, n, scaled, pred, scaled - pred])
        res[m] = {"count": n, "scaled_count": scaled, "predicted": pred, "residual": scaled - pred}
    _emit(run, {"h_eff": h_eff, "coefficient": name, "counts": res},
          ["method", "N", "scaled_count", "predicted", "residual"], rows)
    if plot:
        _plot(run, "plot_spectra", specs, run.window)
    kv = {f"count_{m}": r["count"] for m, r in res.items()}
    return summary(h_eff=h_eff, **kv, **{name: pred})


def cmd_trace(run: Run, plot: bool = False) -> str:
    run.require_f()
    specs = run.spectra()
    name, pred = run.predicted_trace(run.bands())
    h_eff = next(iter(specs.values())).regime.h_eff
    rows, res = [], {}
    for m, s in specs.items():
        tr = trace_sum(s, run.f)
        scaled = h_eff**2 * tr
        rows.append([m, tr, scaled, pred, scaled - pred])
        res[m] = {"trace": tr, "scaled_trace": scaled, "predicted": pred, "residual": scaled - pred}
    _emit(run, {"h_eff": h_eff, "coefficient": name, "traces": res},
          ["method", "trace", "scaled_trace", "predicted", "residual"], rows)
    if plot:
        _plot(run, "plot_spectra", specs, run.window)
    return summary(h_eff=h_eff, **{f"trace_{m}": r["trace"] for m, r in res.items()}, **{name: pred})


def cmd_density(run: Run, plot: bool = False) -> str:
    run.require_f()
    if run.t_grid is None:
        raise ConfigError("density needs a t_grid block")
    specs = run.spectra()
    bands = run.bands()
    h_eff = next(iter(specs.values())).regime.h_eff
    eps = h_eff**2
    mol = make_mollifier(run.numerics.get("C", 1.0))
    c0 = None
    if run.mode == "semiclassical":
        c0 = [v for _, v in asy.c0_curve(run.f, run.pot, bands, run.t_grid)]
    cols, kv, scaled_all = {}, {}, {}
    for m, s in specs.items():
        d = [v for _, v in smoothed_density(s, run.f, mol, eps, run.t_grid)]
        sc = [eps * v for v in d]
        cols[m] = d
        scaled_all[m] = sc
        if c0 is not None:
            dev = [abs(a - b) / abs(b) for a, b in zip(sc, c0) if b != 0]
            kv[f"max_rel_dev_{m}"] = max(dev) if dev else None
    t = run.t_grid.tolist()
    header = ["t"] + [f"density_{m}" for m in specs] + [f"scaled_{m}" for m in specs] + ["c0"]
    rows = [[t[i]] + [cols[m][i] for m in specs] + [scaled_all[m][i] for m in specs] + [None if c0 is None else c0[i]]
            for i in range(len(t))]
    _emit(run, {"h_eff": h_eff, "eps": eps, "t": t, "density": cols, "scaled": scaled_all, "c0": c0},
          header, rows)
    if plot:
        m0 = next(iter(specs))
        _plot(run, "plot_density", t, scaled_all[m0], c0)
    return summary(h_eff=h_eff, eps=eps, **kv)


def cmd_coeffs(run: Run, plot: bool = False) -> str:
    bands = run.bands()
    rep = asy.CoeffReport(meta={"bands": [bands.l0, bands.l], "window": [run.window.a, run.window.b]})
    kv = {}
    if run.pot.kind is PotentialKind.POWER_TAIL and run.mode == "coupling":
        rep.D0 = asy.D0(run.window, run.pot)
        kv["D0"] = rep.D0
        if run.f is not None:
            rep.b0 = asy.b0(run.f, run.pot)
            kv["b0"] = rep.b0
    else:
        rep.C0 = asy.C0(run.window, run.pot, bands)
        kv["C0"] = rep.C0
        if run.f is not None:
            rep.alpha0 = asy.alpha0(run.f, run.pot, bands, rtol=1e-10)
            kv["alpha0"] = rep.alpha0
            if run.t_grid is not None:
                rep.c0_samples = asy.c0_curve(run.f, run.pot, bands, run.t_grid)
    if rep.c0_samples:
        _emit(run, rep.to_dict(), ["t", "c0"], [list(p) for p in rep.c0_samples])
    else:
        _emit(run, rep.to_dict(), ["name", "value"], [[k, v] for k, v in kv.items()])
    if plot and rep.c0_samples:
        _plot(run, "plot_c0", rep.c0_samples)
    return f"bands: {bands} " + summary(**kv)


def cmd_sweep(run: Run, plot: bool = False) -> str:
    (method,) = run.methods(allow_all=False)
    if run.mode == "semiclassical":
        hs = run.reg.get("h_list")
        if not hs:
            raise ConfigError("semiclassical sweep needs regime.h_list (or --h with a list)")
        sw = h_sweep(run.pot, run.window, hs, run.f, method=method, jobs=run.jobs, numerics=run.numerics)
    else:
        ls = run.reg.get("lambda_list")
        if not ls:
            raise ConfigError("coupling sweep needs regime.lambda_list (or --lambda with a list)")
        if run.delta is not None and run.pot.delta is not None and abs(run.delta - run.pot.delta) > 1e-12:
            raise ConfigError("regime delta does not match potential delta")
        sw = lambda_sweep(run.pot, run.window, ls, method=method, jobs=run.jobs, numerics=run.numerics)
    rows = [[p, h, n, s, sw.predicted, r]
            for p, h, n, s, r in zip(sw.params, sw.h_eff, sw.counts, sw.scaled_counts, sw.residuals)]
    footer = [["fit_p", sw.fit_p], ["fit_c", sw.fit_c]]
    if sw.trace_residuals:
        footer += [["trace_fit_p", sw.trace_fit_p], ["trace_fit_c", sw.trace_fit_c]]
    result = sw.to_dict()
    result["tail_ok"] = sw.tail_ok
    _emit(run, result, ["param", "h_eff", "N", "scaled_count", "predicted", "residual"], rows, footer)
    if plot:
        _plot(run, "plot_sweep", sw)
    kv = {"method": method, "fit_p": sw.fit_p, "fit_c": sw.fit_c, "tail_ok": sw.tail_ok}
    if sw.trace_residuals:
        kv["trace_fit_p"] = sw.trace_fit_p
    return " ".join([f"method={method}", summary(**{k: v for k, v in kv.items() if k != "method"})])


DISPATCH = {
    "bands": cmd_bands,
    "spectrum": cmd_spectrum,
    "count": cmd_count,
    "trace": cmd_trace,
    "density": cmd_density,
    "coeffs": cmd_coeffs,
    "sweep": cmd_sweep,
}


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = lwio.load_config(args.config)
        cfg = apply_overrides(cfg, args)
        run = Run(cfg, resolve_jobs(args.jobs))
        if args.plot and not run.out_path:
            raise ConfigError("--plot needs an output path (--out or output.path)")
        line = DISPATCH[args.command](run, plot=args.plot)
    except LandauWeylError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception as exc:  # pragma: no cover - last-resort mapping
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 5
    print(line)
    return 0


if __name__ == "__main__":
    sys.exit(main())
