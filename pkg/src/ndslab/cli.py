"""Configuration-driven front end: parse a run description, execute it, emit reports.

Config document (YAML or JSON)::

    systems:
      shift:   {space: {type: shift}, sequence: {type: constant, map: {kind: shift, power: 1}}}
      rot:     {space: {type: circle}, sequence: {type: constant, map: {kind: rotation, angle: 3/7}}}
      ten:     {example: ten-block-thick-syndetic}
      g:       {example: product-syndetic-weakmix, part: 1}
      toy:     {space: {type: shift}, sequence: {type: blocks, pattern: lizi-f}}
    checks:
      - {system: shift, notion: transitive, resolution: 2, horizon: 8}
      - {system: shift, notion: mildly_mixing_surrogate, registry: [rot]}
    suites:
      - {example: padded-rotation}
      - {theorem: iteration-invariance-multi, bounds: {n_max: 3}}
      - {search: Q1, budget: 10}
    output: {format: json, path: report.json}

Reports are canonical JSON (sorted keys, two-space indent, exact numbers as
strings). Wall-clock times live under the top-level ``timing`` key only, so
two runs of one config differ only there.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from fractions import Fraction

import yaml

from . import __version__
from . import gallery as G
from . import maps as M
from . import properties as P
from . import space as S
from . import system as Y
from .errors import NdsError, ResourceLimit
from .verdict import NOTIONS, CheckSpec, jsonable

SCHEMA_VERSION = 1
SPEC_FIELDS = tuple(f.name for f in fields(CheckSpec) if f.name != "notion")
PATTERNS = ("lizi-f", "lizi-g", "iter-f", "iter-g", "ten-block", "padded-rotation")


class ConfigError(NdsError):
    def __init__(self, errors):
        super().__init__("; ".join(errors))
        self.errors = list(errors)


@dataclass(frozen=True)
class CheckItem:
    system: str
    spec: CheckSpec
    registry: tuple = ()


@dataclass(frozen=True)
class SuiteItem:
    kind: str  # example | theorem | search
    id: str
    options: tuple = ()  # sorted (key, value) pairs


@dataclass
class RunConfig:
    systems: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    suites: list = field(default_factory=list)
    output: dict = field(default_factory=lambda: {"format": "json", "path": None})


# ---------------------------------------------------------------- parsing


def _freeze(x):
    if isinstance(x, dict):
        return tuple(sorted((str(k), _freeze(v)) for k, v in x.items()))
    if isinstance(x, list):
        return tuple(_freeze(v) for v in x)
    return x


def _thaw(x):
    if isinstance(x, tuple) and all(isinstance(p, tuple) and len(p) == 2 and isinstance(p[0], str) for p in x) and x:
        return {k: _thaw(v) for k, v in x}
    if isinstance(x, tuple):
        return [_thaw(v) for v in x]
    return x


def _positive(errs, path, name, v):
    if isinstance(v, bool) or not isinstance(v, int):
        errs.append(f"{path}.{name}: {name} must be an integer")
        return False
    if v < 1:
        errs.append(f"{path}.{name}: {name} must be ≥ 1")
        return False
    return True


def _system_desc(errs, name, d):
    path = f"systems.{name}"
    if not isinstance(d, dict):
        errs.append(f"{path}: system description must be a mapping")
        return None
    if "example" in d:
        ex = d["example"]
        if ex not in G.EXAMPLES:
            errs.append(f"{path}.example: unknown example {ex!r}")
            return None
        part = d.get("part", 0)
        if part not in (0, 1):
            errs.append(f"{path}.part: part must be 0 or 1")
        try:
            G.example_params(ex, d.get("params"))
        except NdsError as e:
            errs.append(f"{path}.params: {e}")
        return dict(d)
    for key in ("space", "sequence"):
        if key not in d:
            errs.append(f"{path}.{key}: missing")
            return None
    try:
        S.space_from_json(d["space"])
    except (NdsError, KeyError, TypeError, ValueError) as e:
        errs.append(f"{path}.space: {e}")
    seq = d["sequence"]
    t = seq.get("type") if isinstance(seq, dict) else None
    if t == "constant":
        _map_ok(errs, f"{path}.sequence.map", seq.get("map"))
    elif t == "periodic":
        maps_ = seq.get("maps")
        if not isinstance(maps_, list) or not maps_:
            errs.append(f"{path}.sequence.maps: need a non-empty list")
        else:
            for i, m in enumerate(maps_):
                _map_ok(errs, f"{path}.sequence.maps[{i}]", m)
    elif t == "blocks":
        if seq.get("pattern") not in PATTERNS:
            errs.append(f"{path}.sequence.pattern: unknown pattern {seq.get('pattern')!r}")
    else:
        errs.append(f"{path}.sequence.type: unknown sequence type {t!r}")
    return dict(d)


def _map_ok(errs, path, m):
    if not isinstance(m, dict):
        errs.append(f"{path}: map must be a mapping")
        return
    try:
        M.map_from_json(m)
    except (NdsError, KeyError, TypeError, ValueError, ZeroDivisionError) as e:
        errs.append(f"{path}: {e}")


def _check_item(errs, i, d, systems, overrides):
    path = f"checks[{i}]"
    if not isinstance(d, dict):
        errs.append(f"{path}: check must be a mapping")
        return None
    sys_name = d.get("system")
    if sys_name not in systems:
        errs.append(f"{path}.system: unknown system {sys_name!r}")
    notion = d.get("notion")
    if notion not in NOTIONS:
        errs.append(f"{path}.notion: unknown notion {notion!r}")
        return None
    unknown = sorted(set(d) - set(SPEC_FIELDS) - {"system", "notion", "registry"})
    for k in unknown:
        errs.append(f"{path}.{k}: unknown field")
    kw = {k: d[k] for k in SPEC_FIELDS if k in d}
    kw.update({k: v for k, v in overrides.items() if v is not None})
    ok = True
    for k in ("horizon", "order", "m_bound", "n_bound", "gap_bound", "run_request", "tuple_cap", "cofinite_tail"):
        if k in kw and kw[k] is not None:
            ok = _positive(errs, path, k, kw[k]) and ok
    res = kw.get("resolution")
    if res is not None:
        rs = res if isinstance(res, list) else [res]
        for r in rs:
            ok = _positive(errs, path, "resolution", r) and ok
    for k in ("vector", "vector_bound", "index_set"):
        if k in kw:
            if not isinstance(kw[k], list):
                errs.append(f"{path}.{k}: must be a list")
                ok = False
            else:
                kw[k] = tuple(kw[k])
    if isinstance(res, list):
        kw["resolution"] = tuple(res)
    registry = d.get("registry", [])
    if not isinstance(registry, list):
        errs.append(f"{path}.registry: must be a list of system names")
        registry = []
    for j, r in enumerate(registry):
        if r not in systems:
            errs.append(f"{path}.registry[{j}]: unknown system {r!r}")
    if not ok:
        return None
    try:
        spec = CheckSpec(notion=notion, **kw)
    except (NdsError, TypeError, ValueError) as e:
        errs.append(f"{path}: {e}")
        return None
    return CheckItem(sys_name, spec, tuple(registry))


def _suite_item(errs, i, d):
    path = f"suites[{i}]"
    if isinstance(d, str):
        d = {"example": d} if d in G.EXAMPLES else {"theorem": d}
    if not isinstance(d, dict):
        errs.append(f"{path}: suite must be a mapping")
        return None
    kinds = [k for k in ("example", "theorem", "search") if k in d]
    if len(kinds) != 1:
        errs.append(f"{path}: exactly one of example / theorem / search is required")
        return None
    kind = kinds[0]
    ident = d[kind]
    opts = {k: v for k, v in d.items() if k != kind}
    if kind == "example":
        if ident not in G.EXAMPLES:
            errs.append(f"{path}.example: unknown example {ident!r}")
            return None
        try:
            G.example_params(ident, opts.get("params"))
        except NdsError as e:
            errs.append(f"{path}.params: {e}")
    elif kind == "theorem":
        if ident not in G.SUITES:
            errs.append(f"{path}.theorem: unknown theorem suite {ident!r}")
            return None
        for k in opts.get("bounds", {}) or {}:
            if k not in G.SUITES[ident].bounds:
                errs.append(f"{path}.bounds.{k}: unknown bound")
    else:
        if ident not in G.QUESTIONS:
            errs.append(f"{path}.search: unknown question {ident!r}")
            return None
        if "budget" in opts:
            if isinstance(opts["budget"], bool) or not isinstance(opts["budget"], int) or opts["budget"] < 0:
                errs.append(f"{path}.budget: budget must be ≥ 0")
    return SuiteItem(kind, ident, _freeze(opts))


def parse_config(text, horizon=None, resolution=None):
    """Validated RunConfig; raises ConfigError listing every problem with its path."""
    try:
        doc = yaml.safe_load(text) if text and text.strip() else {}
    except yaml.YAMLError as e:
        raise ConfigError([f"<document>: not a well-formed document: {e}"]) from None
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError(["<document>: top level must be a mapping"])
    errs = []
    for k in sorted(set(doc) - {"systems", "checks", "suites", "output"}):
        errs.append(f"{k}: unknown section")
    systems_doc = doc.get("systems") or {}
    if not isinstance(systems_doc, dict):
        errs.append("systems: must be a mapping of names to descriptions")
        systems_doc = {}
    systems = {}
    for name, d in systems_doc.items():
        desc = _system_desc(errs, str(name), d)
        if desc is not None:
            systems[str(name)] = _freeze(desc)
    overrides = {"horizon": horizon, "resolution": resolution}
    if horizon is not None:
        _positive(errs, "--horizon", "horizon", horizon)
    if resolution is not None:
        _positive(errs, "--resolution", "resolution", resolution)
    checks = []
    checks_doc = doc.get("checks") or []
    if not isinstance(checks_doc, list):
        errs.append("checks: must be a list")
        checks_doc = []
    names = set(systems_doc)
    for i, d in enumerate(checks_doc):
        item = _check_item(errs, i, d, names, overrides)
        if item is not None:
            checks.append(item)
    suites = []
    suites_doc = doc.get("suites") or []
    if not isinstance(suites_doc, list):
        errs.append("suites: must be a list")
        suites_doc = []
    for i, d in enumerate(suites_doc):
        item = _suite_item(errs, i, d)
        if item is not None:
            suites.append(item)
    out = doc.get("output") or {}
    fmt = out.get("format", "json") if isinstance(out, dict) else None
    if fmt not in ("json", "markdown"):
        errs.append(f"output.format: must be json or markdown, got {fmt!r}")
    if errs:
        raise ConfigError(errs)
    return RunConfig(systems, checks, suites, {"format": fmt, "path": out.get("path")})


def config_to_dict(cfg):
    checks = []
    for c in cfg.checks:
        d = {"system": c.system, **jsonable(c.spec.to_json())}
        # the stored tail, not the horizon-derived default, so overrides still apply
        d["cofinite_tail"] = c.spec.cofinite_tail
        d = {k: v for k, v in d.items() if v is not None}
        if c.registry:
            d["registry"] = list(c.registry)
        checks.append(d)
    suites = [dict(_thaw(s.options) or {}, **{s.kind: s.id}) for s in cfg.suites]
    out = {"format": cfg.output["format"]}
    if cfg.output.get("path"):
        out["path"] = cfg.output["path"]
    return {"systems": {k: _thaw(v) for k, v in cfg.systems.items()}, "checks": checks, "suites": suites, "output": out}


def emit_config(cfg):
    """A config document that parses back to an equal RunConfig."""
    return yaml.safe_dump(config_to_dict(cfg), sort_keys=True, allow_unicode=True)


def config_digest(cfg):
    return hashlib.sha256(canonical_json(config_to_dict(cfg)).encode()).hexdigest()


# ---------------------------------------------------------------- building systems


def _pattern(seq):
    p = seq.get("params") or {}
    name = seq["pattern"]
    if name == "lizi-f":
        return G._blocks(G.lizi_f_rule, name)
    if name == "lizi-g":
        return G._blocks(G.lizi_g_rule, name)
    if name == "iter-f":
        return G._blocks(G.iterate_f_rule(int(p.get("n", 3))), name, n=int(p.get("n", 3)))
    if name == "iter-g":
        return G._blocks(G.iterate_g_rule(int(p.get("n", 3))), name, n=int(p.get("n", 3)))
    if name == "ten-block":
        return G._blocks(G.ten_block_rule, name)
    alpha = Fraction(str(p.get("alpha", "159/257")))
    return G._blocks(G.padded_rotation_rule(alpha), name, alpha=alpha)


def build_system(name, desc):
    d = _thaw(desc)
    if "example" in d:
        built = G.build_example(d["example"], d.get("params"))
        if isinstance(built, tuple):
            built = built[d.get("part", 0)]
        return built
    space = S.space_from_json(d["space"])
    seq = d["sequence"]
    if seq["type"] == "constant":
        s = Y.Constant(M.map_from_json(seq["map"]))
    elif seq["type"] == "periodic":
        s = Y.Periodic(tuple(M.map_from_json(m) for m in seq["maps"]))
    else:
        s = _pattern(seq)
    return Y.system(space, s, name=name)


# ---------------------------------------------------------------- running


def canonical_json(x):
    return json.dumps(jsonable(x), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _run_check(item, systems):
    sys_ = systems[item.system]
    reg = [systems[r] for r in item.registry]
    v = P.check(sys_, item.spec, reg)
    out = {"verdict": v.to_json()}
    if v.fails:
        out["replay"] = P.replay(sys_, v, reg)
    return out


def _run_suite(item, jobs):
    opts = _thaw(item.options) or {}
    if item.kind == "example":
        return G.run_example(item.id, opts.get("params"))
    if item.kind == "theorem":
        bounds = opts.get("bounds") or {}
        bounds = {k: tuple(v) if isinstance(v, list) else v for k, v in bounds.items()}
        return G.verify_theorem(item.id, None, bounds, jobs=1)
    return G.search_counterexample(item.id, None, opts.get("budget", 10))


def _guard(fn):
    """Run one item; library errors become item data, anything else is internal."""
    t0 = time.perf_counter()
    try:
        res = {"status": "completed", **{"result": fn()}}
    except ResourceLimit as e:
        res = {"status": "resource-limit", "error": str(e)}
    except NdsError as e:
        res = {"status": "error", "error": f"{type(e).__name__}: {e}"}
    except Exception as e:  # noqa: BLE001 - reported, then exit code 2
        res = {"status": "internal-error", "error": f"{type(e).__name__}: {e}"}
    return res, round(time.perf_counter() - t0, 3)


def run(cfg, jobs=1):
    """Execute every item; results are assembled in config order."""
    t0 = time.perf_counter()
    systems, build_errors = {}, {}
    for name, desc in cfg.systems.items():
        try:
            systems[name] = build_system(name, desc)
        except NdsError as e:
            build_errors[name] = f"{type(e).__name__}: {e}"

    def check_task(item):
        def fn():
            missing = [n for n in (item.system, *item.registry) if n in build_errors]
            if missing:
                raise NdsError(f"system {missing[0]!r} could not be built: {build_errors[missing[0]]}")
            return _run_check(item, systems)

        return fn

    tasks = [(f"checks[{i}]", "check", c, check_task(c)) for i, c in enumerate(cfg.checks)]
    tasks += [(f"suites[{i}]", s.kind, s, (lambda s=s: _run_suite(s, jobs))) for i, s in enumerate(cfg.suites)]
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as ex:
        futs = [ex.submit(_guard, t[3]) for t in tasks]
        results = [f.result() for f in futs]

    items, timing = [], {}
    for (ident, kind, obj, _), (res, secs) in zip(tasks, results):
        entry = {"id": ident, "kind": kind}
        if kind == "check":
            entry.update({"system": obj.system, "notion": obj.spec.notion})
        else:
            entry["name"] = obj.id
        entry.update(res)
        items.append(entry)
        timing[ident] = secs
    timing["total"] = round(time.perf_counter() - t0, 3)
    return {
        "schema_version": SCHEMA_VERSION,
        "tool": "ndslab",
        "tool_version": __version__,
        "config_digest": config_digest(cfg),
        "systems": {name: (systems[name].describe() if name in systems else None) for name in cfg.systems},
        "system_errors": build_errors,
        "items": items,
        "timing": timing,
    }


def strip_timing(report):
    return {k: v for k, v in report.items() if k != "timing"}


# ---------------------------------------------------------------- emitting


def emit(report, fmt="json"):
    if fmt == "json":
        return canonical_json(report)
    if fmt == "markdown":
        return _markdown(report)
    raise NdsError(f"unknown format {fmt!r}")


def _md_verdict_params(p):
    return ", ".join(f"{k}={json.dumps(jsonable(v), ensure_ascii=False)}" for k, v in sorted(p.items()))


_SIDES = ("left", "right", "thick", "totally_transitive", "delta_transitive")


def _row_detail(row):
    if row.get("final"):
        body = " / ".join(row["final"])
    elif "rows" in row:
        body = "; ".join(f"{r_['notion']}: {r_['outcome']}" for r_ in row["rows"])
    else:
        body = " / ".join(f"{k}={row[k]['status']}" for k in _SIDES if isinstance(row.get(k), dict))
    return f"n={row['n']}: {body}" if "n" in row else body


def _markdown(rep):
    out = [
        "# ndslab report",
        "",
        f"- tool version: {rep['tool_version']}",
        f"- schema version: {rep['schema_version']}",
        f"- config digest: `{rep['config_digest']}`",
        "",
    ]
    checks = [i for i in rep["items"] if i["kind"] == "check"]
    if checks:
        out += ["## Checks", "", "| item | system | notion | status | parameters |", "|---|---|---|---|---|"]
        for i in checks:
            if i["status"] == "completed":
                v = i["result"]["verdict"]
                out.append(f"| {i['id']} | {i['system']} | {i['notion']} | {v['status']} | "
                           f"{_md_verdict_params(v['params'])} |")
            else:
                out.append(f"| {i['id']} | {i['system']} | {i['notion']} | {i['status']} | {i.get('error', '')} |")
        out.append("")
    for i in rep["items"]:
        if i["kind"] == "check":
            continue
        out += [f"## {i['kind']}: {i['name']}", ""]
        if i["status"] != "completed":
            out += [f"{i['status']}: {i.get('error', '')}", ""]
            continue
        r = i["result"]
        if i["kind"] == "example":
            out += ["| subject | notion | expected | observed | match | claim |", "|---|---|---|---|---|---|"]
            for row in r["rows"]:
                out.append(f"| {row['subject']} | {row['notion']} | {row['expected']} | {row['observed']} | "
                           f"{'yes' if row['match'] else 'NO'} | {row['claim']} |")
            out += [""] + [f"- note: {n}" for n in r["notes"]] + [""]
        elif i["kind"] == "theorem":
            out += [f"{r['statement']}.", "", f"Policy: {r['policy']}.", "",
                    f"Outcome: **{r['outcome']}** ({r['flagged']} flagged of {len(r['rows'])} rows). {r['note']}.", ""]
            if i["name"] != "chain-delta-mixing":
                out += ["| system | detail | outcome |", "|---|---|---|"]
                for row in r["rows"]:
                    out.append(f"| {row.get('system', '')} | {_row_detail(row)} | {row['outcome']} |")
                out.append("")
        else:
            out += [f"Pattern sought: {r['pattern']}. {r['note']}.", "",
                    f"Evaluated {r['evaluated']} of {r['family_size']} members; candidates: "
                    f"{', '.join(r['candidates']) or 'none'}.", ""]
    return "\n".join(out).rstrip() + "\n"


# ---------------------------------------------------------------- entry point


def _default_jobs():
    try:
        return max(1, int(os.environ.get("NDSLAB_JOBS", "1")))
    except ValueError:
        return 1


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="run description (YAML or JSON)")
    common.add_argument("--horizon", type=int, help="override every check horizon")
    common.add_argument("--resolution", type=int, help="override every check resolution")
    common.add_argument("--format", choices=("json", "markdown"), help="report format")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--jobs", type=int, default=_default_jobs(), help="parallel items (default $NDSLAB_JOBS or 1)")
    p = argparse.ArgumentParser(prog="ndslab", description="Horizon-bounded transitivity checks for non-autonomous systems")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common], help="run the checks and suites of a config")
    g = sub.add_parser("gallery", parents=[common], help="run the example gallery")
    g.add_argument("--example", action="append", choices=G.EXAMPLE_IDS, help="restrict to these examples")
    v = sub.add_parser("verify", parents=[common], help="run theorem suites on the shipped registry")
    v.add_argument("--suite", action="append", choices=G.SUITE_IDS, help="restrict to these suites")
    s = sub.add_parser("search", parents=[common], help="search the toy family for candidate counterexamples")
    s.add_argument("--question", choices=tuple(G.QUESTIONS), default="Q1")
    s.add_argument("--budget", type=int, default=10)
    return p


def _config_for(args):
    if args.command == "check":
        if not args.config:
            raise ConfigError(["--config: required for check"])
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise ConfigError([f"--config: {e}"]) from None
        return parse_config(text, args.horizon, args.resolution)
    if args.command == "gallery":
        ids = args.example or list(G.EXAMPLE_IDS)
        params = {"horizon": args.horizon} if args.horizon else {}
        if args.resolution:
            params["resolution"] = args.resolution
        doc = {"suites": [{"example": i, **({"params": params} if params else {})} for i in ids]}
    elif args.command == "verify":
        doc = {"suites": [{"theorem": i} for i in (args.suite or list(G.SUITE_IDS))]}
    else:
        doc = {"suites": [{"search": args.question, "budget": args.budget}]}
    return parse_config(json.dumps(doc))


def main(argv=None):
    args = _parser().parse_args(argv)
    if args.jobs is not None and args.jobs < 1:
        print("config error: --jobs must be ≥ 1", file=sys.stderr)
        return 1
    try:
        cfg = _config_for(args)
    except ConfigError as e:
        for err in e.errors:
            print(f"config error: {err}", file=sys.stderr)
        return 1
    try:
        report = run(cfg, jobs=args.jobs)
        fmt = args.format or cfg.output["format"]
        text = emit(report, fmt)
        path = args.out or cfg.output.get("path")
        if path:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except Exception as e:  # noqa: BLE001
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    return 2 if any(i["status"] == "internal-error" for i in report["items"]) else 0


if __name__ == "__main__":
    sys.exit(main())
