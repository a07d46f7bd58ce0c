"""Command-line front end: ``wpent run | verify | sweep``.

Configuration is an INI file with one section per module. Every key must be
known; ``WPENT_<SECTION>_<KEY>`` environment variables override file values.
Exit codes: 0 success, 1 verification failure, 2 configuration error.
"""

import argparse
import configparser
import csv
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from . import gaussian as G
from . import oracle as O
from . import scenarios as Sc
from . import singlephoton as S
from . import witnesses as W
from .exceptions import ParameterError
from .lattice import GridSpec, build_grids, isolated_mode_weights, radial_weights

log = logging.getLogger("wpent")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
SCENARIOS = ("two_cavity", "spontaneous", "superradiance", "wp_nonclassicality", "efield_onset")


class ConfigError(Exception):
    pass


def _pos(x):
    return x > 0


def _nonneg(x):
    return x >= 0


def _any(x):
    return True


def _choice(*opts):
    def check(x):
        return x in opts
    check.__doc__ = "one of " + ", ".join(opts)
    return check


_RULE_TEXT = {_pos: "> 0", _nonneg: ">= 0", _any: "valid"}

# section -> key -> (type, default, check)
SCHEMA = {
    "run": {
        "scenario": (str, "two_cavity", _choice(*SCENARIOS)),
        "seed": (int, 0, lambda x: 0 <= x < 2 ** 64),
        "n_points": (int, 2000, lambda x: x >= 2),
        "span": (float, 10.0, _pos),
    },
    "cavity": {
        "omega1": (float, 1.0, _pos), "gamma1": (float, 0.01, _pos), "g1": (float, 0.05, _any),
        "a1_re": (float, 2 ** -0.5, _any), "a1_im": (float, 0.0, _any),
        "omega2": (float, 1.0, _pos), "gamma2": (float, 0.01, _pos), "g2": (float, 0.05, _any),
        "a2_re": (float, 2 ** -0.5, _any), "a2_im": (float, 0.0, _any),
    },
    "atom": {
        "omega_eg": (float, 1.0, _pos), "gamma": (float, 0.01, _pos), "g": (float, 0.05, _any),
    },
    "ensemble": {
        "n_atoms": (int, 10, lambda x: x >= 1),
        "preset": (str, "colocated", _choice("colocated", "random")),
        "gamma_n": (float, 0.01, _pos), "omega_eg": (float, 1.0, _pos), "g": (float, 0.05, _any),
        "side_wavelengths": (float, 10.0, _pos),
    },
    "squeezing": {
        "preset": (str, "isolated", _choice("isolated", "profile", "pair")),
        "r": (str, "0.5,0.5", _any),
        "theta": (float, 0.0, _any),
        "eps": (float, 0.01, lambda x: 0 < x <= 1),
        "pair_r": (float, 1.0, _nonneg),
    },
    "efield": {
        "z_max": (float, 200.0, _pos), "n_z": (int, 50, lambda x: x >= 1),
        "t_max": (float, 200.0, _pos), "n_t": (int, 50, lambda x: x >= 1),
        "volume1": (float, 1.0, _pos), "volume2": (float, 1.0, _pos),
    },
    "grid": {
        "points_per_axis": (int, 256, lambda x: x >= 2),
    },
    "verify": {
        "tol_radial": (float, 1e-6, _pos), "tol_ksum": (float, 1e-3, _pos),
        "tol_ode": (float, 0.02, _pos), "tol_moments": (float, 1e-9, _pos),
        "ode_modes": (int, 400, lambda x: x >= 1),
    },
    "sweep": {
        "axis": (str, "r", _choice("r", "gamma_n", "n_atoms")),
        "start": (float, 0.0, _nonneg), "stop": (float, 1.0, _nonneg),
        "num": (int, 11, _any),
    },
}


@dataclass(frozen=True)
class RunConfig:
    values: dict  # section -> key -> typed value

    def __getitem__(self, section):
        return self.values[section]

    def echo(self):
        return {sec: dict(sorted(kv.items())) for sec, kv in sorted(self.values.items())}


def _convert(section, key, raw):
    typ, _, check = SCHEMA[section][key]
    try:
        val = typ(raw) if typ is not int else int(str(raw), 0)
    except ValueError:
        raise ConfigError(f"{section}.{key}: cannot parse {raw!r} as {typ.__name__}")
    if typ is float and not np.isfinite(val):
        raise ConfigError(f"{section}.{key}: must be finite (got {raw!r})")
    if not check(val):
        rule = _RULE_TEXT.get(check) or check.__doc__ or "within its allowed range"
        raise ConfigError(f"{section}.{key} must be {rule} (got {raw!r})")
    return val


def load_config(path=None, environ=None, seed=None) -> RunConfig:
    """Defaults, then file values, then WPENT_ environment, then ``seed``."""
    environ = os.environ if environ is None else environ
    raw = {sec: {k: spec[1] for k, spec in keys.items()} for sec, keys in SCHEMA.items()}
    if path is not None:
        cp = configparser.ConfigParser(interpolation=None)
        cp.optionxform = str
        try:
            with open(path, encoding="utf-8") as fh:
                cp.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}")
        for sec in cp.sections():
            if sec not in SCHEMA:
                raise ConfigError(f"unknown section [{sec}]")
            for key, val in cp.items(sec):
                if key not in SCHEMA[sec]:
                    raise ConfigError(f"unknown key {sec}.{key}")
                raw[sec][key] = val
    for name, val in environ.items():
        if not name.startswith("WPENT_"):
            continue
        rest = name[len("WPENT_"):].lower()
        sec = next((s for s in SCHEMA if rest.startswith(s + "_")), None)
        if sec is None or rest[len(sec) + 1:] not in SCHEMA[sec]:
            raise ConfigError(f"environment override {name} does not name a config key")
        raw[sec][rest[len(sec) + 1:]] = val
    if seed is not None:
        raw["run"]["seed"] = seed
    values = {sec: {k: _convert(sec, k, v) for k, v in keys.items()} for sec, keys in raw.items()}
    cfg = RunConfig(values)
    _build_params(cfg)  # validate physics before any run
    return cfg


def _guard(section, fn, *args):
    try:
        return fn(*args)
    except ParameterError as exc:
        raise ConfigError(f"[{section}] {exc}")


def _build_params(cfg: RunConfig):
    c = cfg["cavity"]
    p1 = _guard("cavity", S.CavityParams, c["omega1"], c["gamma1"], c["g1"],
                complex(c["a1_re"], c["a1_im"]))
    p2 = _guard("cavity", S.CavityParams, c["omega2"], c["gamma2"], c["g2"],
                complex(c["a2_re"], c["a2_im"]))
    _guard("cavity", S.validate_pair, p1, p2)
    a = cfg["atom"]
    atom = _guard("atom", S.AtomParams, a["omega_eg"], a["gamma"], a["g"])
    e = cfg["ensemble"]
    if e["preset"] == "colocated":
        ens = _guard("ensemble", Sc.colocated_ensemble, e["n_atoms"], e["gamma_n"], e["omega_eg"], e["g"])
    else:
        ens = _guard("ensemble", Sc.random_ensemble, e["n_atoms"], cfg["run"]["seed"],
                     e["side_wavelengths"], e["gamma_n"], e["omega_eg"], e["g"])
    q = cfg["squeezing"]
    try:
        rs = [float(x) for x in q["r"].split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"squeezing.r must be a comma-separated list of numbers (got {q['r']!r})")
    if not rs:
        raise ConfigError("squeezing.r must list at least one value")
    if q["preset"] == "pair":
        source = _guard("squeezing", G.PairSqueezing, 0, 1, q["pair_r"])
    else:
        source = _guard("squeezing", G.SqueezingProfile, rs, q["theta"])
    return {"p1": p1, "p2": p2, "atom": atom, "ensemble": ens, "squeezing": source}


# ------------------------------------------------------------------ output


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return "%.17g" % float(x)


def write_csv(path, names, units, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"{n} [{u}]" for n, u in zip(names, units)])
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _series_csv(path, ts: Sc.TimeSeries, time_unit):
    names = ["t"] + ts.names
    units = [time_unit] + [ts.units.get(n, "1") for n in ts.names]
    rows = zip(ts.times, *(ts.columns[n] for n in ts.names))
    write_csv(path, names, units, rows)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (complex, np.complexfloating)):
        return [float(np.real(x)), float(np.imag(x))]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    return x


def write_json(path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(payload), fh, sort_keys=True, indent=2)
        fh.write("\n")


# ------------------------------------------------------------------ run


def cmd_run(cfg: RunConfig, out: Path) -> int:
    params = _build_params(cfg)
    run = cfg["run"]
    scen = run["scenario"]
    out.mkdir(parents=True, exist_ok=True)
    summary = {"tool": "wpent", "version": __version__, "seed": run["seed"],
               "scenario": scen, "config": cfg.echo()}
    files = []
    if scen == "two_cavity":
        p1 = params["p1"]
        t = Sc.default_time_grid(p1.gamma, run["span"], run["n_points"])
        ts = Sc.run_two_cavity(p1, params["p2"], t)
        _series_csv(out / "two_cavity.csv", ts, "1/omega")
        files.append("two_cavity.csv")
        i = int(np.argmin(ts["lambda_hz_scaled"]))
        summary["summary"] = {
            "plateau_scale": ts.metadata["plateau_scale"],
            "min_lambda_hz_scaled": ts["lambda_hz_scaled"][i],
            "argmin_gamma_t": ts["gamma_t"][i],
            "final_lambda_hz_scaled": ts["lambda_hz_scaled"][-1],
            "final_lambda_sph_scaled": ts["lambda_sph_scaled"][-1],
        }
    elif scen == "spontaneous":
        p = params["atom"]
        ts = Sc.run_spontaneous(p, Sc.default_time_grid(p.gamma, run["span"], run["n_points"]))
        _series_csv(out / "spontaneous.csv", ts, "1/omega")
        files.append("spontaneous.csv")
        summary["summary"] = {k: ts.metadata[k] for k in ("min_mu_hz", "argmin_gamma_t")}
    elif scen == "superradiance":
        e = params["ensemble"]
        seed = run["seed"] if cfg["ensemble"]["preset"] == "random" else None
        t = Sc.default_time_grid(2 * e.gamma_n, run["span"], run["n_points"])
        ts = Sc.run_superradiance(e, t, seed=seed)
        _series_csv(out / "superradiance.csv", ts, "1/omega")
        files.append("superradiance.csv")
        summary["summary"] = {k: ts.metadata[k] for k in
                              ("n_atoms", "zeta_sq", "gamma_n", "min_mu_hz", "argmin_gamma_t")}
    elif scen == "wp_nonclassicality":
        q = cfg["squeezing"]
        preset = "isolated" if q["preset"] == "pair" else q["preset"]
        reps = Sc.run_wp_nonclassicality(params["squeezing"], preset, q["eps"])
        rows = [(r.name, r.value, r.flag) for r in reps.values()]
        write_csv(out / "wp_nonclassicality.csv", ["witness", "value", "flag"], ["-", "1", "bool"], rows)
        files.append("wp_nonclassicality.csv")
        summary["summary"] = {k: {"value": r.value, "flag": r.flag} for k, r in reps.items()}
    else:  # efield_onset
        f = cfg["efield"]
        z = np.linspace(0.0, f["z_max"], f["n_z"])
        t = np.linspace(0.0, f["t_max"], f["n_t"])
        m = Sc.run_efield_onset(params["p1"], params["p2"], z, t, f["volume1"], f["volume2"])
        write_csv(out / "efield_onset.csv", ["t", "z1", "z2", "lambda_raw", "lambda_normalized"],
                  ["1/omega", "1/omega", "1/omega", "1", "1"], m.rows())
        files.append("efield_onset.csv")
        summary["summary"] = {"min_normalized": m.normalized.min(), "n_zero": int(np.sum(m.raw == 0))}
    summary["files"] = files
    write_json(out / "summary.json", summary)
    log.info("wrote %s", ", ".join(files + ["summary.json"]))
    return EXIT_OK


# ------------------------------------------------------------------ verify


@dataclass(frozen=True)
class Comparison:
    quantity: str
    closed: float
    oracle: float
    error: float
    tol: float

    @property
    def passed(self):
        return bool(self.error <= self.tol)


def _rel(a, b):
    return abs(a - b) / max(abs(a), 1e-300)


def verification_suite(cfg: RunConfig, tol=None):
    """Closed form vs oracle comparisons; ``tol`` overrides every tolerance."""
    params = _build_params(cfg)
    v = cfg["verify"]
    pick = (lambda t: t) if tol is None else (lambda t: tol)
    out = []
    p1 = params["p1"]
    for gt in (0.01, 0.1, 1.0, 10.0):
        t = gt / p1.gamma
        jc, jn = S.j_closed(p1, t), O.j_numeric_radial(p1, t)
        out.append(Comparison(f"|J| radial, gamma t={gt:g}", abs(jc), abs(jn), _rel(jc, jn),
                              pick(v["tol_radial"])))
    n = cfg["grid"]["points_per_axis"]
    for gt in (0.1, 0.5):
        t = gt / p1.gamma
        jc, jn = S.j_closed(p1, t), O.j_numeric_ksum(p1, t, n)
        out.append(Comparison(f"|J| k-sum N={n}, gamma t={gt:g}", abs(jc), abs(jn), _rel(jc, jn),
                              pick(v["tol_ksum"])))
    # collective annihilator on a radial grid
    t = 1.0 / p1.gamma
    spec = GridSpec(1, 2.2 * t, 2 * n)
    rg, kg = build_grids(spec)
    st = S.cavity_amplitudes(p1, t, kg, radial=True)
    jc, ja = S.j_closed(p1, t), S.apply_collective(st, radial_weights(kg, rg, p1.k_res))
    out.append(Comparison(f"|J| collective N={2 * n}, gamma t=1", abs(jc), abs(ja), _rel(jc, ja),
                          pick(v["tol_ksum"])))
    # superradiant factorization vs per-atom retarded sum
    e = params["ensemble"]
    t = 1.0 / (2 * e.gamma_n)
    jc, jn = S.j_superradiant(e, t), O.j_numeric_superradiant(e, t)
    out.append(Comparison("|J_SR| per-atom sum, gamma t=1", abs(jc), abs(jn), _rel(jc, jn),
                          pick(v["tol_radial"])))
    # Wigner-Weisskopf decay vs discrete-mode ODE
    ts = np.linspace(0.0, 3.0 / p1.gamma, 301)
    res = O.amplitudes_ode(S.CavityParams(p1.omega, p1.gamma, p1.g), ts, v["ode_modes"])
    dev = float(np.max(np.abs(res.b - np.exp(-p1.gamma * ts / 2))))
    out.append(Comparison(f"max|b - exp(-gamma t/2)|, M={v['ode_modes']}", 0.0, dev, dev,
                          pick(v["tol_ode"])))
    # Gaussian collective moments vs explicit loops
    q = cfg["squeezing"]
    rs = [float(x) for x in q["r"].split(",") if x.strip()]
    s = G.squeezed_profile_state(G.SqueezingProfile(rs, q["theta"]))
    w = isolated_mode_weights(len(rs), np.arange(len(rs)), q["eps"])
    lam = W.lambda_sm(G.collective_moments(s, w)).value
    b = O.moments_bruteforce(s, w)
    lam_b = 0.5 + b.adag_a - abs(b.mean) ** 2 - abs(b.a2 - b.mean ** 2)
    out.append(Comparison("lambda_sm squeezed preset", lam, lam_b, abs(lam - lam_b),
                          pick(v["tol_moments"])))
    pair = G.two_mode_squeeze(G.vacuum(2), G.PairSqueezing(0, 1, q["pair_r"]))
    w2 = isolated_mode_weights(2, [0, 1], q["eps"])
    lam = W.lambda_sm(G.collective_moments(pair, w2)).value
    b = O.moments_bruteforce(pair, w2)
    lam_b = 0.5 + b.adag_a - abs(b.a2)
    out.append(Comparison("lambda_sm entangled pair", lam, lam_b, abs(lam - lam_b),
                          pick(v["tol_moments"])))
    # spontaneous emission: sparse one-excitation algebra on a radial grid
    a = params["atom"]
    t = 1.0 / a.gamma
    stand_in = S.CavityParams(a.omega_eg, a.gamma, a.g)
    spec = GridSpec(1, 2.2 * t, 2 * n)
    rg, kg = build_grids(spec)
    st = S.cavity_amplitudes(stand_in, t, kg, radial=True)
    _, m_sa = O.single_excitation_moments(st.source, st.reservoir[0], None,
                                          radial_weights(kg, rg, a.k_res).values, spin=True)
    mu_closed = -np.exp(-a.gamma * t) * abs(S.j_closed(a, t)) ** 2
    mu_oracle = W.mu_hz(0.0, m_sa).value
    out.append(Comparison("mu_HZ spontaneous, gamma t=1", mu_closed, mu_oracle,
                          _rel(mu_closed, mu_oracle), pick(v["tol_ksum"])))
    return out


def cmd_verify(cfg: RunConfig, tol=None, stream=None) -> int:
    stream = sys.stdout if stream is None else stream
    rows = verification_suite(cfg, tol)
    head = f"{'quantity':<42} {'closed':>14} {'oracle':>14} {'rel.err':>10} {'tol':>8}  result"
    print(head, file=stream)
    print("-" * len(head), file=stream)
    for c in rows:
        print(f"{c.quantity:<42} {c.closed:>14.7g} {c.oracle:>14.7g} {c.error:>10.2e} "
              f"{c.tol:>8.1e}  {'PASS' if c.passed else 'FAIL'}", file=stream)
    ok = all(c.passed for c in rows)
    print(f"{sum(c.passed for c in rows)}/{len(rows)} passed", file=stream)
    return EXIT_OK if ok else EXIT_FAIL


# ------------------------------------------------------------------ sweep


def sweep_points(axis, start, stop, num):
    if axis == "n_atoms":
        pts = np.arange(int(round(start)), int(round(stop)) + 1)
    else:
        pts = np.linspace(start, stop, num) if num > 0 else np.array([])
    if pts.size == 0:
        raise ConfigError(f"sweep over {axis} is empty (start={start}, stop={stop}, num={num})")
    return pts


def cmd_sweep(cfg: RunConfig, out: Path, axis=None, start=None, stop=None, num=None) -> int:
    sw = cfg["sweep"]
    axis = sw["axis"] if axis is None else axis
    start = sw["start"] if start is None else start
    stop = sw["stop"] if stop is None else stop
    num = sw["num"] if num is None else num
    pts = sweep_points(axis, start, stop, num)
    params = _build_params(cfg)
    out.mkdir(parents=True, exist_ok=True)
    run = cfg["run"]
    rows = []
    if axis == "r":
        q = cfg["squeezing"]
        n_modes = len([x for x in q["r"].split(",") if x.strip()])
        names, units = ["r", "lambda_sm", "bs_sph"], ["1", "1", "1"]
        for r in pts:
            if q["preset"] == "pair":
                src = G.PairSqueezing(0, 1, r)
                reps = Sc.run_wp_nonclassicality(src, "isolated", q["eps"])
            else:
                src = G.SqueezingProfile(np.full(n_modes, r), q["theta"])
                reps = Sc.run_wp_nonclassicality(src, q["preset"], q["eps"])
            rows.append((r, reps["lambda_sm"].value, reps["bs"].value))
    elif axis == "gamma_n":
        e = params["ensemble"]
        names = ["gamma_n", "min_mu_hz", "argmin_t"]
        units = ["omega", "1", "1/omega"]
        for gn in pts:
            if gn <= 0:
                raise ConfigError("sweep over gamma_n needs values > 0")
            ens = S.EnsembleParams(e.positions, e.k0, gn, e.omega_eg, e.g)
            t = Sc.default_time_grid(2 * gn, run["span"], run["n_points"])
            ts = Sc.run_superradiance(ens, t)
            i = int(np.argmin(ts["mu_hz"]))
            rows.append((gn, ts["mu_hz"][i], t[i]))
    else:
        e = cfg["ensemble"]
        names, units = ["n_atoms", "zeta_sq", "min_mu_hz"], ["1", "1", "1"]
        for n in pts:
            if e["preset"] == "colocated":
                ens = Sc.colocated_ensemble(int(n), e["gamma_n"], e["omega_eg"], e["g"])
            else:
                ens = Sc.random_ensemble(int(n), run["seed"], e["side_wavelengths"],
                                         e["gamma_n"], e["omega_eg"], e["g"])
            t = Sc.default_time_grid(2 * ens.gamma_n, run["span"], run["n_points"])
            ts = Sc.run_superradiance(ens, t)
            rows.append((int(n), ts.metadata["zeta_sq"], ts.metadata["min_mu_hz"]))
    write_csv(out / f"sweep_{axis}.csv", names, units, rows)
    write_json(out / "sweep_summary.json", {
        "tool": "wpent", "version": __version__, "seed": run["seed"], "axis": axis,
        "points": len(rows), "config": cfg.echo(), "files": [f"sweep_{axis}.csv"],
    })
    return EXIT_OK


# ------------------------------------------------------------------ entry point


def build_parser():
    ap = argparse.ArgumentParser(prog="wpent", description="Wavepacket entanglement witnesses.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("run", "verify", "sweep"):
        sp_ = sub.add_parser(name)
        sp_.add_argument("--config", type=Path, default=None)
        sp_.add_argument("--out", type=Path, default=Path("wpent_out"))
        sp_.add_argument("--seed", type=int, default=None)
        sp_.add_argument("--tol", type=float, default=None)
        sp_.add_argument("-v", "--verbose", action="store_true")
        if name == "sweep":
            sp_.add_argument("--axis", choices=("r", "gamma_n", "n_atoms"), default=None)
            sp_.add_argument("--start", type=float, default=None)
            sp_.add_argument("--stop", type=float, default=None)
            sp_.add_argument("--num", type=int, default=None)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.seed is not None and not 0 <= args.seed < 2 ** 64:
            raise ConfigError(f"--seed must be an unsigned 64-bit integer (got {args.seed})")
        if args.tol is not None and not (np.isfinite(args.tol) and args.tol > 0):
            raise ConfigError(f"--tol must be a positive number (got {args.tol})")
        cfg = load_config(args.config, seed=args.seed)
        if args.command == "run":
            return cmd_run(cfg, args.out)
        if args.command == "verify":
            return cmd_verify(cfg, args.tol)
        return cmd_sweep(cfg, args.out, args.axis, args.start, args.stop, args.num)
    except ConfigError as exc:
        print(f"wpent: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
