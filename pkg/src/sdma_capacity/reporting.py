"""Result serialization: fixed-column CSV and schema-validated JSON.

Density/sweep rows use the documented column set
    scheme,M,N,K,alpha,beta,epsilon,D,rho,eta,lambda_eps,ase,method,
    ci_low,ci_high,trials,seed
and outage rows the parallel set with (lam, p_out) in place of
(lambda_eps, ase). Output is byte-stable for a fixed seed: floats are
serialized with repr and JSON keys are sorted; no timestamps.
"""

from __future__ import annotations

import csv
import io
import json
from importlib import resources

DENSITY_COLUMNS = [
    "scheme", "M", "N", "K", "alpha", "beta", "epsilon", "D", "rho", "eta",
    "lambda_eps", "ase", "method", "ci_low", "ci_high", "trials", "seed",
]
OUTAGE_COLUMNS = [
    "scheme", "M", "N", "K", "alpha", "beta", "epsilon", "D", "rho", "eta",
    "lam", "p_out", "method", "ci_low", "ci_high", "trials", "seed",
]


def density_row(params, result, trials=None, seed=None, error=None) -> dict:
    return {
        "scheme": result.scheme.value if result else None,
        "M": params.M, "N": params.N, "K": params.K,
        "alpha": params.alpha, "beta": params.beta, "epsilon": params.epsilon,
        "D": params.D, "rho": params.rho, "eta": params.eta,
        "lambda_eps": result.lambda_eps if result else None,
        "ase": result.ase if result else None,
        "method": result.method if result else "error",
        "ci_low": result.lambda_lower if result else None,
        "ci_high": result.lambda_upper if result else None,
        "trials": trials, "seed": seed,
        **({"error": error} if error else {}),
    }


def outage_row(estimate) -> dict:
    p = estimate.params
    return {
        "scheme": estimate.scheme.value,
        "M": p.M, "N": p.N, "K": p.K,
        "alpha": p.alpha, "beta": p.beta, "epsilon": p.epsilon,
        "D": p.D, "rho": p.rho, "eta": p.eta,
        "lam": p.lam, "p_out": estimate.p_hat, "method": "mc-outage",
        "ci_low": estimate.ci_low, "ci_high": estimate.ci_high,
        "trials": estimate.trials, "seed": estimate.seed,
    }


def sweep_row(row, params) -> dict:
    return {
        "scheme": row.scheme.value,
        "M": row.M, "N": row.N, "K": row.K,
        "alpha": params.alpha, "beta": params.beta, "epsilon": params.epsilon,
        "D": params.D, "rho": params.rho, "eta": params.eta,
        "lambda_eps": row.lambda_eps, "ase": row.ase, "method": row.method,
        "ci_low": row.ci_low, "ci_high": row.ci_high,
        "trials": row.trials, "seed": row.seed,
        **({"error": row.error} if row.error else {}),
    }


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def rows_to_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def document(kind: str, rows: list[dict], config_dict: dict,
             slopes: dict | None = None, exponents: dict | None = None,
             checks: list[dict] | None = None) -> dict:
    doc = {"kind": kind, "config": config_dict, "rows": rows}
    if slopes is not None:
        doc["slopes"] = {f"{k[0]}/{k[1]}" if isinstance(k, tuple) else k: v
                         for k, v in slopes.items()}
    if exponents is not None:
        doc["exponents"] = exponents
    if checks is not None:
        doc["checks"] = checks
    return doc


def to_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def load_schema() -> dict:
    text = resources.files("sdma_capacity.schemas").joinpath("results.schema.json").read_text()
    return json.loads(text)


def write_output(path: str, kind: str, rows: list[dict], columns: list[str],
                 fmt: str, config_dict: dict, **doc_kw) -> None:
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            fh.write(rows_to_csv(rows, columns))
    elif fmt == "json":
        with open(path, "w") as fh:
            fh.write(to_json(document(kind, rows, config_dict, **doc_kw)))
    else:
        raise ValueError(f"unknown format {fmt!r}")
