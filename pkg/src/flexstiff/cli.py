"""flexstiff command-line interface.

    flexstiff <spring|suspension|compare|sweep|render> [--config PATH] [--json] [--csv PATH] [--svg PATH]

Exit codes: 0 success, 1 invalid input, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from .analysis import (
    SweepSpec,
    coupling_metrics,
    default_sweep_values,
    response_curve,
    run_sweep,
    solve_response,
)
from .castigliano import LoadVector, SpringConstants, spring_constants
from .config import Config, load_config
from .errors import SingularCompliance, ValidationError
from .fe_oracle import Mode, build_mirror_model, solve_static
from .geometry import UM, SpringVariant
from .suspension import LayoutKind, build_suspension
from .svg import render_layout, render_line_plot

REFERENCE_R_Y = -0.24
REFERENCE_GAP = 0.20
PARITY_RTOL = 1e-10
ZERO_RTOL = 1e-9

SWEEP_COLUMNS = ["param_name", "param_value", "r_y", "r_y_normalized", "k_x", "k_y", "k_xy", "errors"]
COMPARE_COLUMNS = ["fx_un", "dy_nm", "dphi_urad", "source", "layout"]

_K_NAMES = (
    ("x", "N_per_m"), ("y", "N_per_m"), ("phi", "Nm_per_rad"),
    ("xy", "N_per_m"), ("xphi", "N_per_rad"), ("yphi", "N_per_rad"),
)
_K_INDEX = {"x": (0, 0), "y": (1, 1), "phi": (2, 2), "xy": (0, 1), "xphi": (0, 2), "yphi": (1, 2)}


def _num(v):
    return repr(float(v))


def _params_doc(cfg: Config):
    p = cfg.params
    doc = {"N": int(p.n_meanders)}
    for name in ("l1", "l2", "l3", "l4", "l5", "w_o", "w_p", "w_pc"):
        doc[f"{name}_um"] = getattr(p, name) / UM
    doc["thickness_um"] = p.thickness / UM
    doc["youngs_modulus_gpa"] = p.youngs_modulus / 1e9
    doc["reflector_side_um"] = cfg.reflector_side / UM
    return doc


def _constants_doc(k: SpringConstants):
    return {f"k_{n}_{u}": getattr(k, f"k_{n}") for n, u in _K_NAMES}


def _k_doc(m):
    return {f"K_{n}_{u}": float(m[_K_INDEX[n]]) for n, u in _K_NAMES}


def _suspension(cfg: Config, layout=None):
    return build_suspension(cfg.params, layout or cfg.layout, cfg.reflector_half_len,
                            l_m=cfg.l_m_override, l_rss=cfg.l_rss_override)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_spring(cfg: Config, args):
    ka = spring_constants(cfg.params, SpringVariant.TYPE_A)
    kb = spring_constants(cfg.params, SpringVariant.TYPE_B)
    parity = {}
    worst = 0.0
    for n, _ in _K_NAMES:
        a = getattr(ka, f"k_{n}")
        b = getattr(kb, f"k_{n}")
        expect = -a if n in ("xy", "xphi") else a
        err = abs(b - expect) / max(abs(a), 1e-300)
        worst = max(worst, err)
        parity[f"k_{n}"] = bool(err <= PARITY_RTOL)
    return {
        "command": "spring",
        "params": _params_doc(cfg),
        "spring_constants": {"type_a": _constants_doc(ka), "type_b": _constants_doc(kb)},
        "mirror_parity": {"flags": parity, "max_relative_error": worst, "ok": all(parity.values())},
    }, {}


def _zero_structure(m, layout):
    scale = np.abs(m).max()
    zeros = {n: bool(abs(m[_K_INDEX[n]]) <= ZERO_RTOL * scale) for n in ("xy", "xphi", "yphi")}
    expected = {"xy": layout is LayoutKind.AXISYMMETRIC,
                "xphi": layout is LayoutKind.CENTROSYMMETRIC,
                "yphi": True}
    return {"is_zero": zeros, "expected_zero": expected,
            "matches_expected": all(zeros[n] for n in zeros if expected[n])}


def _is_spd(m):
    try:
        np.linalg.cholesky(0.5 * (m + m.T))
        return True
    except np.linalg.LinAlgError:
        return False


def cmd_suspension(cfg: Config, args):
    model = _suspension(cfg)
    t1 = model.table1.values
    rb = model.rigid_body.values
    disc = {}
    for n, u in _K_NAMES:
        a, b = t1[_K_INDEX[n]], rb[_K_INDEX[n]]
        denom = max(abs(a), abs(b))
        disc[f"K_{n}"] = 0.0 if denom == 0 else abs(a - b) / denom
    return {
        "command": "suspension",
        "params": _params_doc(cfg),
        "layout": model.layout.value,
        "geometry": {"l_m_um": model.geometry.l_m / UM, "l_rss_um": model.geometry.l_rss / UM},
        "spring_constants_type_a": _constants_doc(model.spring_constants),
        "stiffness": {"table1": _k_doc(t1), "rigid_body": _k_doc(rb)},
        "zero_structure": {"table1": _zero_structure(t1, model.layout),
                           "rigid_body": _zero_structure(rb, model.layout)},
        "positive_definite": {"table1": _is_spd(t1), "rigid_body": _is_spd(rb)},
        "table1_vs_rigid_body_relative_difference": disc,
        "coupling": {
            "table1": _coupling_doc(model.table1),
            "rigid_body": _coupling_doc(model.rigid_body),
        },
    }, {}


def _coupling_doc(k):
    c = coupling_metrics(k)
    return {
        "r_y": c.r_y,
        "r_phi_norm": c.r_phi_norm,
        "exact_dy_per_fx_m_per_N": c.exact_dy_per_fx,
        "approx_dy_per_fx_m_per_N": c.approx_dy_per_fx,
        "exact_dphi_per_fx_rad_per_N": c.exact_dphi_per_fx,
    }


def _oracle_curve(model, mode, fx):
    mm = build_mirror_model(model, mode)
    out = []
    for f in fx:
        mm.model.loads = {mm.left_edge: LoadVector(fx=float(f))}
        out.append(solve_static(mm.model).displacements[mm.center])
    return np.array(out)


def cmd_compare(cfg: Config, args):
    rows = []
    summary = {}
    for layout in LayoutKind:
        model = _suspension(cfg, layout)
        curve = response_curve(model.rigid_body, cfg.fx_max, cfg.samples)
        full = _oracle_curve(model, Mode.FULL, curve.fx)
        stiff = _oracle_curve(model, Mode.NEAR_INEXTENSIBLE, curve.fx[-1:])[0]
        calc_end = np.array([curve.dx[-1], curve.dy[-1], curve.d_phi[-1]])
        t1_end = solve_response(model.table1, LoadVector(fx=cfg.fx_max)).as_array()
        for k, f in enumerate(curve.fx):
            rows.append([_num(f * 1e6), _num(curve.dy[k] * 1e9), _num(curve.d_phi[k] * 1e6), "calculated", layout.value])
        for k, f in enumerate(curve.fx):
            rows.append([_num(f * 1e6), _num(full[k, 1] * 1e9), _num(full[k, 2] * 1e6), "oracle_full", layout.value])
        coupled = 1 if layout is LayoutKind.CENTROSYMMETRIC else 2
        summary[layout.value] = {
            "fx_max_un": cfg.fx_max * 1e6,
            "calculated": _disp_doc(calc_end),
            "table1_calculated": _disp_doc(t1_end),
            "oracle_full": _disp_doc(full[-1]),
            "oracle_near_inextensible": _disp_doc(stiff),
            "full_over_calculated_dx": float(full[-1, 0] / calc_end[0]),
            "full_over_calculated_coupled": float(full[-1, coupled] / calc_end[coupled]),
            "near_inextensible_over_calculated_coupled": float(stiff[coupled] / calc_end[coupled]),
        }
    doc = {
        "command": "compare",
        "params": _params_doc(cfg),
        "layouts": summary,
        "reference_gap": REFERENCE_GAP,
    }
    return doc, {"csv": (COMPARE_COLUMNS, rows)}


def _disp_doc(d):
    return {"dx_nm": float(d[0] * 1e9), "dy_nm": float(d[1] * 1e9), "dphi_urad": float(d[2] * 1e6)}


def _display_value(param, v):
    return int(v) if param == "N" else float(v) / UM


def cmd_sweep(cfg: Config, args):
    values = cfg.sweep_values or default_sweep_values(cfg.sweep_parameter, cfg.params)
    spec = SweepSpec(cfg.sweep_parameter, values, cfg.params, cfg.layout, cfg.reflector_half_len)
    result = run_sweep(spec, workers=min(4, os.cpu_count() or 1))
    rows = []
    for r in result.rows:
        pv = _display_value(spec.parameter, r.value)
        rows.append([spec.parameter, str(pv) if spec.parameter == "N" else _num(pv), _num(r.r_y),
                     _num(r.r_y_normalized), _num(r.k_x), _num(r.k_y), _num(r.k_xy), r.error])
    doc = {
        "command": "sweep",
        "params": _params_doc(cfg),
        "layout": spec.layout.value,
        "provenance": spec.provenance.value,
        "parameter": spec.parameter,
        "parameter_unit": "count" if spec.parameter == "N" else "um",
        "baseline_value": _display_value(spec.parameter, result.baseline_value),
        "baseline_r_y": result.baseline_r_y,
        "reference_r_y": REFERENCE_R_Y,
        "max_relative_change_abs_r_y": result.max_relative_change(),
        "rows": [
            {"param_value": _display_value(spec.parameter, r.value), "r_y": r.r_y,
             "r_y_normalized": r.r_y_normalized, "K_x_N_per_m": r.k_x, "K_y_N_per_m": r.k_y,
             "K_xy_N_per_m": r.k_xy, "error": r.error}
            for r in result.rows
        ],
    }
    unit = "" if spec.parameter == "N" else " (um)"
    svg = render_line_plot(
        [_display_value(spec.parameter, r.value) for r in result.rows],
        [r.r_y_normalized for r in result.rows],
        f"{spec.parameter}{unit}", "normalized R_y", title=f"R_y sweep over {spec.parameter}",
        reference=1.0,
    )
    return doc, {"csv": (SWEEP_COLUMNS, rows), "svg": svg}


def cmd_render(cfg: Config, args):
    model = _suspension(cfg)
    svg = render_layout([s.global_path for s in model.springs], model.reflector_half_len, cfg.reflector_side)
    doc = {
        "command": "render",
        "layout": model.layout.value,
        "variants": [s.variant.value for s in model.springs],
        "px_per_um": 2.0,
        "svg": svg,
    }
    return doc, {"svg": svg}


COMMANDS = {
    "spring": cmd_spring,
    "suspension": cmd_suspension,
    "compare": cmd_compare,
    "sweep": cmd_sweep,
    "render": cmd_render,
}


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _write_csv(path, columns, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())


def _flatten(doc, prefix=""):
    for k, v in doc.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            yield from _flatten(v, key + ".")
        elif isinstance(v, list):
            for i, item in enumerate(v):
                if isinstance(item, dict):
                    yield from _flatten(item, f"{key}[{i}].")
                else:
                    yield f"{key}[{i}]", item
        else:
            yield key, v


def _print_text(doc, out):
    for key, v in _flatten(doc):
        if key == "svg":
            continue
        if isinstance(v, float):
            v = f"{v:.6g}"
        out.write(f"{key}: {v}\n")


def build_parser():
    parser = argparse.ArgumentParser(prog="flexstiff", description="Serpentine spring suspension stiffness analysis.")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="INI config file; defaults to the built-in reference design")
    parser.add_argument("--json", action="store_true", help="print the machine-readable report")
    parser.add_argument("--csv", metavar="PATH", help="write the CSV table (compare, sweep)")
    parser.add_argument("--svg", metavar="PATH", help="write the SVG figure (sweep, render)")
    return parser


def main(argv=None, stdout=None):
    out = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        doc, extra = COMMANDS[args.command](cfg, args)
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except ValidationError as exc:
        sys.stderr.write(f"invalid input: {exc}\n")
        return 1
    except SingularCompliance as exc:
        sys.stderr.write(f"numerical failure: {exc}\n"
                         "hint: the spring path needs transverse segments (l2 > 0, N >= 1) "
                         "to resist loads along every in-plane direction\n")
        return 2
    except np.linalg.LinAlgError as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return 2

    if args.csv and "csv" in extra:
        _write_csv(args.csv, *extra["csv"])
    if args.svg and "svg" in extra:
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(extra["svg"])

    if args.json:
        if args.command == "render" and args.svg:
            doc = {k: v for k, v in doc.items() if k != "svg"}
        out.write(json.dumps(doc, indent=2) + "\n")
    elif args.command == "render" and not args.svg:
        out.write(extra["svg"])
    else:
        _print_text(doc, out)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
