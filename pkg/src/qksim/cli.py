"""Configuration-driven experiment harness and command-line interface.

``run_sweep`` walks the Cartesian grid (train size, shots, noise rate,
calibration method, seed).  For every (train size, seed) cell it builds a
pooled dataset, engineers advantage labels on the pooled ideal kernels,
splits, and then pushes each grid coordinate through the
noise/shot/calibration/training pipeline; an RBF grid-search baseline runs
once per cell.  Output records are sorted by coordinate and serialize
byte-identically across reruns.

Exit codes: 0 success, 1 configuration error, 2 runtime error (partial
results are still written when possible).  ``QKSIM_THREADS`` controls the
sweep worker count; everything else is pinned by the config and seeds.
"""
from __future__ import annotations

import argparse
import concurrent.futures
import dataclasses
import json
import math
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import bounds, calibrate, datasets, kernels, learner, linalg, qsim
from .rng import stream

QUANTUM = "quantum"
RBF_BASELINE = "rbf"

_CONFIG_DEFAULTS = {
    "layers": 8,
    "mixing": kernels.MIX_INVERSE_DIM,
    "ridge": learner.DEFAULT_QUANTUM_RIDGE,
    # nearest-projection floor; 0.1 reproduces the reported two-qubit
    # shot-sweep accuracies on the engineered synthetic data
    "nearest_delta": 0.1,
    "relabel_gamma_scale": 1.0,
    "bound_delta": 0.05,
    # "pipeline" samples test-train kernel entries with the coordinate's
    # shot budget; "exact" evaluates them at expectation, isolating how the
    # train-side calibration generalizes
    "cross_shots": "pipeline",
    "output": None,
}
_CONFIG_REQUIRED = (
    "dataset",
    "num_qubits",
    "train_sizes",
    "test_size",
    "shots",
    "noise_rates",
    "methods",
    "seeds",
)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SweepConfig:
    dataset: dict
    num_qubits: int
    train_sizes: tuple[int, ...]
    test_size: int
    shots: tuple[object, ...]  # ints or the "inf" sentinel
    noise_rates: tuple[float, ...]
    methods: tuple[str, ...]
    seeds: tuple[int, ...]
    layers: int = 8
    mixing: str = kernels.MIX_INVERSE_DIM
    ridge: float = learner.DEFAULT_QUANTUM_RIDGE
    nearest_delta: float = 0.1
    relabel_gamma_scale: float = 1.0
    bound_delta: float = 0.05
    cross_shots: str = "pipeline"
    output: str | None = None

    @classmethod
    def from_dict(cls, raw: dict) -> "SweepConfig":
        known = set(_CONFIG_REQUIRED) | set(_CONFIG_DEFAULTS)
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        missing = [k for k in _CONFIG_REQUIRED if k not in raw]
        if missing:
            raise ConfigError(f"missing config keys: {missing}")
        merged = dict(_CONFIG_DEFAULTS)
        merged.update(raw)

        dataset = merged["dataset"]
        if not isinstance(dataset, dict) or dataset.get("kind") not in (
            "synthetic",
            "csv",
        ):
            raise ConfigError('dataset must be {"kind": "synthetic"|"csv", ...}')
        if dataset["kind"] == "csv" and "path" not in dataset:
            raise ConfigError("csv dataset needs a path")
        extra_ds = set(dataset) - {"kind", "path"}
        if extra_ds:
            raise ConfigError(f"unknown dataset keys: {sorted(extra_ds)}")

        try:
            shots = tuple(kernels.parse_shots(m) for m in merged["shots"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad shots entry: {exc}") from exc
        rates = tuple(float(p) for p in merged["noise_rates"])
        if any(not 0.0 <= p <= 1.0 for p in rates):
            raise ConfigError("noise_rates must lie in [0, 1]")
        methods = tuple(str(m) for m in merged["methods"])
        bad = [m for m in methods if m not in calibrate.METHODS + (calibrate.NONE,)]
        if bad:
            raise ConfigError(f"unknown calibration methods: {bad}")
        seeds = tuple(int(s) for s in merged["seeds"])
        if not seeds:
            raise ConfigError("seeds must be nonempty")
        sizes = tuple(int(n) for n in merged["train_sizes"])
        if not sizes or any(n < 1 for n in sizes):
            raise ConfigError("train_sizes must be positive")
        num_qubits = int(merged["num_qubits"])
        if not 1 <= num_qubits <= qsim.MAX_QUBITS:
            raise ConfigError(f"num_qubits must be in [1, {qsim.MAX_QUBITS}]")
        if merged["cross_shots"] not in ("pipeline", "exact"):
            raise ConfigError('cross_shots must be "pipeline" or "exact"')

        return cls(
            dataset=dataset,
            num_qubits=num_qubits,
            train_sizes=sizes,
            test_size=int(merged["test_size"]),
            shots=shots,
            noise_rates=rates,
            methods=methods,
            seeds=seeds,
            layers=int(merged["layers"]),
            mixing=str(merged["mixing"]),
            ridge=float(merged["ridge"]),
            nearest_delta=float(merged["nearest_delta"]),
            relabel_gamma_scale=float(merged["relabel_gamma_scale"]),
            bound_delta=float(merged["bound_delta"]),
            cross_shots=str(merged["cross_shots"]),
            output=merged["output"],
        )

    @classmethod
    def from_json_file(cls, path) -> "SweepConfig":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(raw)


@dataclass
class ResultRecord:
    kind: str
    n: int
    n_test: int
    m: object = None  # int | "inf" | None (baseline rows)
    p_tilde: float | None = None
    method: str | None = None
    seed: int = 0
    gamma: float | None = None
    ridge: float | None = None
    train_accuracy: float | None = None
    test_accuracy: float | None = None
    c1: float | None = None
    geometric_difference: float | None = None
    dist_before: float | None = None
    dist_after: float | None = None
    min_eig_before: float | None = None
    min_eig_after: float | None = None
    passed_lemma: bool | None = None
    p: float | None = None
    c_q: float | None = None
    c2: float | None = None
    term_ideal: float | None = None
    term_noise: float | None = None
    breakdown_p: float | None = None
    error: str | None = None
    wall_time_ms: float | None = None  # in-memory only, never serialized

    def sort_key(self):
        kind_rank = 0 if self.kind == QUANTUM else 1
        if self.m is None:
            m_key = -1.0
        elif self.m == "inf":
            m_key = math.inf
        else:
            m_key = float(self.m)
        return (
            self.n,
            kind_rank,
            m_key,
            self.p_tilde if self.p_tilde is not None else -1.0,
            self.method or "",
            self.seed,
        )


# serialized column order; wall_time_ms deliberately excluded so reruns of
# the same config emit byte-identical files
RESULT_FIELDS = [
    f.name for f in dataclasses.fields(ResultRecord) if f.name != "wall_time_ms"
]


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if math.isnan(v):
        return "nan"
    return f"{v:.17g}"


def _json_cell(value):
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isinf(v) or math.isnan(v):
            return _format_cell(v)
        return v
    if isinstance(value, np.integer):
        return int(value)
    return value


def emit_results(records: list[ResultRecord], path, fmt: str = "csv") -> None:
    """Write records with a fixed header order and 17-significant-digit reals."""
    path = Path(path)
    try:
        if fmt == "csv":
            lines = [",".join(RESULT_FIELDS)]
            for rec in records:
                lines.append(
                    ",".join(_format_cell(getattr(rec, name)) for name in RESULT_FIELDS)
                )
            path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        elif fmt == "json":
            rows = [
                {name: _json_cell(getattr(rec, name)) for name in RESULT_FIELDS}
                for rec in records
            ]
            path.write_text(
                json.dumps(rows, indent=2, sort_keys=False) + "\n", encoding="utf-8"
            )
        else:
            raise ValueError(f"unknown format: {fmt!r}")
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc


def _parse_cell(name: str, text):
    if text in ("", None):
        return None
    if name in ("kind", "method", "error", "m"):
        if name == "m" and text != "inf":
            return int(text)
        return text
    if name == "passed_lemma":
        return text is True or text == "true"
    if name in ("n", "n_test", "seed"):
        return int(text)
    if isinstance(text, str):
        if text == "inf":
            return math.inf
        if text == "-inf":
            return -math.inf
        if text == "nan":
            return math.nan
        return float(text)
    return float(text)


def load_results(path) -> list[ResultRecord]:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    records = []
    if path.suffix == ".json" or text.lstrip().startswith("["):
        for row in json.loads(text):
            records.append(
                ResultRecord(
                    **{name: _parse_cell(name, row.get(name)) for name in RESULT_FIELDS}
                )
            )
        return records
    lines = [ln for ln in text.splitlines() if ln]
    header = lines[0].split(",")
    for line in lines[1:]:
        cells = line.split(",")
        kwargs = {name: _parse_cell(name, cell) for name, cell in zip(header, cells)}
        records.append(ResultRecord(**kwargs))
    return records


@dataclass
class PoolContext:
    """Per-(train size, seed) state shared by all grid coordinates."""

    features: np.ndarray
    labels: np.ndarray
    train_idx: np.ndarray
    test_idx: np.ndarray
    q_train_ideal: np.ndarray
    geometric_difference: float


def _load_pool_features(config: SweepConfig, n_pool: int, seed: int) -> np.ndarray:
    if config.dataset["kind"] == "synthetic":
        ds = datasets.generate_synthetic(n_pool, config.num_qubits, seed)
        return ds.features
    ds = datasets.load_csv(config.dataset["path"])
    feats = ds.features
    if feats.shape[1] > config.num_qubits:
        feats = datasets.pca(feats, config.num_qubits)
    elif feats.shape[1] < config.num_qubits:
        raise ConfigError(
            f"csv has {feats.shape[1]} features, fewer than num_qubits="
            f"{config.num_qubits}"
        )
    if feats.shape[0] < n_pool:
        raise ConfigError(
            f"csv has {feats.shape[0]} rows, need {n_pool} for this sweep cell"
        )
    perm = stream(seed, "pool").permutation(feats.shape[0])
    return feats[np.sort(perm[:n_pool])]


def build_pool(config: SweepConfig, n: int, seed: int) -> PoolContext:
    """Pooled features, engineered labels, split, and pool-level diagnostics."""
    n_pool = n + config.test_size
    feats = _load_pool_features(config, n_pool, seed)
    q_all = kernels.gram_ideal(feats)
    var = learner.pooled_variance(feats)
    if var <= 0.0:
        raise ValueError("pool has zero feature variance")
    gamma = config.relabel_gamma_scale / (feats.shape[1] * var)
    k_all = kernels.rbf_gram(feats, gamma)
    labels = datasets.relabel_for_advantage(
        q_all.matrix, k_all.matrix, ridge=config.ridge
    )
    pool_ds = datasets.Dataset(features=feats, labels=labels)
    split_ds = datasets.split(pool_ds, n, config.test_size, seed)
    geo = kernels.geometric_difference(
        k_all.matrix, q_all.matrix, labels.astype(float), config.ridge
    )
    train_idx = split_ds.train_indices
    return PoolContext(
        features=feats,
        labels=labels,
        train_idx=train_idx,
        test_idx=split_ds.test_indices,
        q_train_ideal=q_all.matrix[np.ix_(train_idx, train_idx)],
        geometric_difference=geo,
    )


def _quantum_record(
    config: SweepConfig,
    pool: PoolContext,
    n: int,
    m,
    p_tilde: float,
    method: str,
    seed: int,
) -> ResultRecord:
    rec = ResultRecord(
        kind=QUANTUM,
        n=n,
        n_test=config.test_size,
        m="inf" if m is kernels.INF_SHOTS else int(m),
        p_tilde=p_tilde,
        method=method,
        seed=seed,
        ridge=config.ridge,
        geometric_difference=pool.geometric_difference,
    )
    started = time.perf_counter()
    try:
        noise = kernels.NoiseModel(
            rate_per_layer=p_tilde, layers=config.layers, mixing=config.mixing
        )
        q_ideal = kernels.KernelMatrix(
            matrix=pool.q_train_ideal,
            provenance=kernels.IDEAL,
            params={"num_qubits": config.num_qubits},
        )
        noisy = kernels.apply_noise(q_ideal, noise, fix_diagonal=True)
        sampled = kernels.sample_shots(noisy, m, seed)
        calibrated, report = calibrate.calibrate_and_report(
            pool.q_train_ideal, sampled.matrix, method, delta=config.nearest_delta
        )
        rec.dist_before = report.dist_before
        rec.dist_after = report.dist_after
        rec.min_eig_before = report.min_eig_before
        rec.min_eig_after = report.min_eig_after
        rec.passed_lemma = report.passed_lemma

        y_train = pool.labels[pool.train_idx].astype(float)
        y_test = pool.labels[pool.test_idx]
        model = learner.fit_krr(calibrated, y_train, config.ridge)
        _, train_pred = learner.predict(model, calibrated)
        rec.train_accuracy = learner.accuracy(train_pred, y_train.astype(int))
        cross_m = kernels.INF_SHOTS if config.cross_shots == "exact" else m
        cross = kernels.quantum_cross(
            pool.features[pool.train_idx],
            pool.features[pool.test_idx],
            noise,
            cross_m,
            seed,
        )
        _, test_pred = learner.predict(model, cross)
        rec.test_accuracy = learner.accuracy(test_pred, y_test)
        rec.c1 = learner.model_complexity_c1(pool.q_train_ideal, y_train, config.ridge)
        # bound terms need a nonsingular ideal kernel; the configured ridge
        # regularizes the rank-deficient small-qubit Gram matrices
        bound = bounds.theorem1_bound(
            pool.q_train_ideal + config.ridge * np.eye(n),
            y_train,
            m,
            noise,
            config.num_qubits,
            config.bound_delta,
        )
        rec.p = bound.p
        rec.c_q = bound.c_q
        rec.c2 = bound.c2
        rec.term_ideal = bound.term_ideal
        rec.term_noise = bound.term_noise
        rec.breakdown_p = bound.breakdown_p
    except Exception as exc:  # per-record capture: the sweep continues
        rec.error = f"{type(exc).__name__}: {exc}"
    rec.wall_time_ms = (time.perf_counter() - started) * 1e3
    return rec


def _rbf_record(config: SweepConfig, pool: PoolContext, n: int, seed: int) -> ResultRecord:
    rec = ResultRecord(
        kind=RBF_BASELINE,
        n=n,
        n_test=config.test_size,
        method="rbf-grid",
        seed=seed,
        geometric_difference=pool.geometric_difference,
    )
    started = time.perf_counter()
    try:
        x_train = pool.features[pool.train_idx]
        y_train = pool.labels[pool.train_idx].astype(float)
        x_test = pool.features[pool.test_idx]
        y_test = pool.labels[pool.test_idx]
        xf, yf, xv, yv = learner.validation_split(x_train, y_train, seed)
        best = learner.grid_search_rbf(xf, yf, xv, yv)
        rec.gamma = best.gamma
        rec.ridge = best.ridge
        k_train = kernels.rbf_gram(x_train, best.gamma)
        model = learner.fit_krr(k_train, y_train, best.ridge)
        _, train_pred = learner.predict(model, k_train.matrix)
        rec.train_accuracy = learner.accuracy(train_pred, y_train.astype(int))
        cross = kernels.rbf_cross(x_train, x_test, best.gamma)
        _, test_pred = learner.predict(model, cross)
        rec.test_accuracy = learner.accuracy(test_pred, y_test)
        rec.c1 = learner.model_complexity_c1(k_train.matrix, y_train, best.ridge)
    except Exception as exc:
        rec.error = f"{type(exc).__name__}: {exc}"
    rec.wall_time_ms = (time.perf_counter() - started) * 1e3
    return rec


def run_sweep(config: SweepConfig) -> list[ResultRecord]:
    pools: dict[tuple[int, int], PoolContext | Exception] = {}
    for n in config.train_sizes:
        for seed in config.seeds:
            try:
                pools[(n, seed)] = build_pool(config, n, seed)
            except Exception as exc:
                pools[(n, seed)] = exc

    tasks = []
    for n in config.train_sizes:
        for m in config.shots:
            for p_tilde in config.noise_rates:
                for method in config.methods:
                    for seed in config.seeds:
                        tasks.append((QUANTUM, n, m, p_tilde, method, seed))
    for n in config.train_sizes:
        for seed in config.seeds:
            tasks.append((RBF_BASELINE, n, None, None, None, seed))

    def run_task(task) -> ResultRecord:
        kind, n, m, p_tilde, method, seed = task
        pool = pools[(n, seed)]
        if isinstance(pool, Exception):
            return ResultRecord(
                kind=kind,
                n=n,
                n_test=config.test_size,
                m=None
                if m is None
                else ("inf" if m is kernels.INF_SHOTS else int(m)),
                p_tilde=p_tilde,
                method=method if kind == QUANTUM else "rbf-grid",
                seed=seed,
                error=f"{type(pool).__name__}: {pool}",
            )
        if kind == QUANTUM:
            return _quantum_record(config, pool, n, m, p_tilde, method, seed)
        return _rbf_record(config, pool, n, seed)

    workers = max(1, int(os.environ.get("QKSIM_THREADS", "1")))
    if workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool_exec:
            records = list(pool_exec.map(run_task, tasks))
    else:
        records = [run_task(t) for t in tasks]
    records.sort(key=ResultRecord.sort_key)
    return records


# ---------------------------------------------------------------------------
# subcommands


def _cmd_sweep(args) -> int:
    try:
        config = SweepConfig.from_json_file(args.config)
        if args.seed is not None:
            config = dataclasses.replace(config, seeds=(args.seed,))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    out = args.out or config.output
    if out is None:
        print("config error: no output path (config.output or --out)", file=sys.stderr)
        return 1
    try:
        records = run_sweep(config)
        emit_results(records, out, args.format)
    except Exception as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    errors = sum(1 for r in records if r.error)
    print(f"wrote {len(records)} records to {out} ({errors} with errors)")
    return 0


def _cmd_kernel(args) -> int:
    try:
        ds = datasets.load_csv(args.data)
        feats = ds.features
        if feats.shape[1] > args.num_qubits:
            feats = datasets.pca(feats, args.num_qubits)
        gram = kernels.gram_ideal(feats)
        if args.p_tilde > 0.0 or args.shots != "inf":
            noise = kernels.NoiseModel(
                rate_per_layer=args.p_tilde, layers=args.layers, mixing=args.mixing
            )
            gram = kernels.apply_noise(
                gram, noise, fix_diagonal=not args.sample_diagonal
            )
            gram = kernels.sample_shots(gram, args.shots, args.seed)
        kernels.save_kernel(gram, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {gram.provenance} kernel ({gram.dim}x{gram.dim}) to {args.out}")
    return 0


def _cmd_calibrate(args) -> int:
    try:
        w = kernels.load_kernel(args.kernel)
        if args.reference:
            q = kernels.load_kernel(args.reference)
            repaired, report = calibrate.calibrate_and_report(
                q.matrix, w.matrix, args.method, delta=args.delta
            )
            print(json.dumps(report.to_dict(), indent=2))
        else:
            repaired = calibrate.apply_method(w.matrix, args.method, args.delta)
        out_kernel = kernels.KernelMatrix(
            matrix=repaired,
            provenance=kernels.CALIBRATED_PREFIX + args.method,
            params=dict(w.params, method=args.method, delta=args.delta),
        )
        kernels.save_kernel(out_kernel, args.out)
    except Exception as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote calibrated kernel to {args.out}")
    return 0


def _cmd_train(args) -> int:
    try:
        gram = kernels.load_kernel(args.kernel)
        ds = datasets.load_csv(args.data)
        if ds.n != gram.dim:
            print(
                f"config error: kernel is {gram.dim}x{gram.dim} but data has "
                f"{ds.n} rows",
                file=sys.stderr,
            )
            return 1
        y = ds.labels.astype(float)
        model = learner.fit_krr(gram, y, args.ridge)
        _, pred = learner.predict(model, gram.matrix)
        summary = {
            "train_accuracy": learner.accuracy(pred, ds.labels),
            "ridge": args.ridge,
        }
        if args.cross and args.test_data:
            cross = linalg.load_matrix_csv(args.cross)
            test_ds = datasets.load_csv(args.test_data)
            _, test_pred = learner.predict(model, cross)
            summary["test_accuracy"] = learner.accuracy(test_pred, test_ds.labels)
        if args.out:
            Path(args.out).write_text(model.to_json() + "\n", encoding="utf-8")
            summary["model"] = str(args.out)
        print(json.dumps(summary, indent=2))
    except Exception as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    return 0


def _cmd_relabel(args) -> int:
    try:
        ds = datasets.load_csv(args.data)
        feats = ds.features
        if feats.shape[1] > args.num_qubits:
            feats = datasets.pca(feats, args.num_qubits)
        q_all = kernels.gram_ideal(feats)
        gamma = args.gamma_scale / (feats.shape[1] * learner.pooled_variance(feats))
        k_all = kernels.rbf_gram(feats, gamma)
        labels = datasets.relabel_for_advantage(
            q_all.matrix, k_all.matrix, ridge=args.ridge
        )
        out_ds = datasets.Dataset(features=feats, labels=labels)
        datasets.save_csv(
            out_ds,
            args.out,
            meta={
                "relabel": {
                    "num_qubits": args.num_qubits,
                    "ridge": args.ridge,
                    "gamma": gamma,
                },
                "source": str(args.data),
            },
        )
    except Exception as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote relabeled dataset ({out_ds.n} rows) to {args.out}")
    return 0


def _cmd_bound(args) -> int:
    try:
        gram = kernels.load_kernel(args.kernel)
        ds = datasets.load_csv(args.data)
        noise = kernels.NoiseModel(
            rate_per_layer=args.p_tilde, layers=args.layers, mixing=args.mixing
        )
        num_qubits = args.num_qubits or int(gram.params.get("num_qubits", 0))
        if num_qubits < 1:
            print(
                "config error: pass --num-qubits (kernel sidecar lacks it)",
                file=sys.stderr,
            )
            return 1
        matrix = gram.matrix
        if args.ridge > 0.0:
            matrix = matrix + args.ridge * np.eye(gram.dim)
        report = bounds.theorem1_bound(
            matrix, ds.labels.astype(float), args.shots, noise, num_qubits, args.delta
        )
        print(json.dumps(report.to_dict(), indent=2))
    except Exception as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    return 0


def _check_lines(trials: int, seed: int) -> list[tuple[str, bool, str]]:
    """Run the property-verifier battery; returns (name, passed, detail) rows."""
    rng = np.random.default_rng(seed)
    out: list[tuple[str, bool, str]] = []

    folding_ok, worst = True, 0.0
    for layers in (1, 2, 4, 8):
        for rate in (0.0, 0.001, 0.05, 0.3):
            for s in range(5):
                unitaries = qsim.random_unitaries(2, layers, seed=s)
                rep = qsim.verify_noise_folding(unitaries, rate, seed=s)
                folding_ok &= rep.passed
                worst = max(worst, rep.max_abs_diff)
    out.append(("noise-folding", folding_ok, f"max entry deviation {worst:.2e}"))

    hoeff_ok = True
    for q in (0.1, 0.5, 0.9):
        for m in (10, 100):
            for gap in (0.1, 0.2):
                rep = bounds.hoeffding_violation_test(
                    q, m, gap, max(trials, 1000), seed
                )
                hoeff_ok &= rep.passed
    out.append(("hoeffding-envelope", hoeff_ok, f"{max(trials, 1000)} trials per cell"))

    pert_ok, applicable = True, 0
    for _ in range(trials):
        dim = int(rng.integers(2, 9))
        a = rng.normal(size=(dim, dim))
        base = linalg.sym_matrix((a + a.T) / 2) + np.eye(dim) * (dim + 2)
        e = rng.normal(size=(dim, dim))
        rep = linalg.inverse_perturbation_check(
            base, base + linalg.sym_matrix((e + e.T) / 2) * 0.05
        )
        pert_ok &= rep.passed
        applicable += rep.applicable
    out.append(("inverse-perturbation", pert_ok, f"{applicable}/{trials} applicable"))

    clip_ok = flip_ok = ident_ok = True
    for _ in range(max(trials // 5, 20)):
        n = int(rng.integers(2, 33))
        ds = datasets.generate_synthetic(n, 2, seed=int(rng.integers(0, 10**6)))
        q = kernels.gram_ideal(ds.features)
        noisy = kernels.apply_noise(
            q, kernels.NoiseModel(0.05, layers=4), fix_diagonal=True
        )
        w = kernels.sample_shots(noisy, 10, int(rng.integers(0, 10**6)))
        base = float(np.linalg.norm(q.matrix - w.matrix, "fro"))
        clip_ok &= (
            float(np.linalg.norm(q.matrix - calibrate.clip(w.matrix), "fro"))
            <= base * (1 + 1e-9)
        )
        flip_ok &= (
            float(np.linalg.norm(q.matrix - calibrate.flip(w.matrix), "fro"))
            <= base * (1 + 1e-9)
        )
        lam_min = min(float(np.min(np.linalg.eigvalsh(w.matrix))), 0.0)
        gap = (
            float(np.linalg.norm(q.matrix - calibrate.shift(w.matrix), "fro")) ** 2
            - base**2
        )
        want = 2 * lam_min * (np.trace(q.matrix) - np.trace(w.matrix)) + n * lam_min**2
        ident_ok &= abs(gap - want) <= 1e-9 * max(1.0, abs(want))
    out.append(("clip-distance", clip_ok, "never increases Frobenius distance"))
    out.append(("flip-distance", flip_ok, "never increases Frobenius distance"))
    out.append(
        (
            "shift-identity",
            ident_ok,
            "distance gap equals 2*lam_min*(trQ-trW) + n*lam_min^2",
        )
    )

    sandwich_ok = True
    for _ in range(trials):
        dim = int(rng.integers(1, 16))
        a = rng.normal(size=(dim, dim))
        m = linalg.sym_matrix((a + a.T) / 2)
        s, f = linalg.spectral_norm(m), linalg.frobenius_norm(m)
        sandwich_ok &= s <= f + 1e-12 and f <= math.sqrt(dim) * s + 1e-12
    out.append(
        ("norm-sandwich", sandwich_ok, "spectral <= frobenius <= sqrt(n)*spectral")
    )
    return out


def _cmd_check(args) -> int:
    try:
        rows = _check_lines(args.trials, args.seed or 0)
    except Exception as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    all_ok = True
    for name, ok, detail in rows:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        all_ok &= ok
    return 0 if all_ok else 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qksim",
        description="quantum kernel simulation, calibration, and sweep harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="run a config-driven parameter sweep")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--out", default=None)
    p_sweep.add_argument("--format", choices=("csv", "json"), default="csv")
    p_sweep.add_argument(
        "--seed", type=int, default=None, help="restrict the sweep to a single seed"
    )
    p_sweep.set_defaults(func=_cmd_sweep)

    p_kernel = sub.add_parser("kernel", help="build and save a kernel matrix")
    p_kernel.add_argument("--data", required=True)
    p_kernel.add_argument("--num-qubits", type=int, required=True)
    p_kernel.add_argument("--p-tilde", type=float, default=0.0)
    p_kernel.add_argument("--layers", type=int, default=8)
    p_kernel.add_argument(
        "--mixing",
        default=kernels.MIX_INVERSE_DIM,
        choices=(kernels.MIX_INVERSE_DIM, kernels.MIX_HALF_INVERSE_DIM),
    )
    p_kernel.add_argument("--shots", default="inf")
    p_kernel.add_argument("--seed", type=int, default=0)
    p_kernel.add_argument(
        "--sample-diagonal",
        action="store_true",
        help="sample the diagonal instead of pinning it at 1",
    )
    p_kernel.add_argument("--out", required=True)
    p_kernel.set_defaults(func=_cmd_kernel)

    p_cal = sub.add_parser("calibrate", help="apply a spectral transform to a kernel")
    p_cal.add_argument("--kernel", required=True)
    p_cal.add_argument(
        "--method", required=True, choices=calibrate.METHODS + (calibrate.NONE,)
    )
    p_cal.add_argument("--delta", type=float, default=0.0)
    p_cal.add_argument(
        "--reference", default=None, help="ideal kernel CSV; prints a calibration report"
    )
    p_cal.add_argument("--out", required=True)
    p_cal.set_defaults(func=_cmd_calibrate)

    p_train = sub.add_parser("train", help="fit a kernel ridge classifier")
    p_train.add_argument("--kernel", required=True)
    p_train.add_argument("--data", required=True)
    p_train.add_argument("--ridge", type=float, default=learner.DEFAULT_QUANTUM_RIDGE)
    p_train.add_argument("--cross", default=None)
    p_train.add_argument("--test-data", default=None)
    p_train.add_argument("--out", default=None)
    p_train.set_defaults(func=_cmd_train)

    p_rel = sub.add_parser("relabel", help="engineer advantage labels for a dataset")
    p_rel.add_argument("--data", required=True)
    p_rel.add_argument("--num-qubits", type=int, required=True)
    p_rel.add_argument("--ridge", type=float, default=learner.DEFAULT_QUANTUM_RIDGE)
    p_rel.add_argument("--gamma-scale", type=float, default=1.0)
    p_rel.add_argument("--out", required=True)
    p_rel.set_defaults(func=_cmd_relabel)

    p_bound = sub.add_parser("bound", help="evaluate generalization-bound terms")
    p_bound.add_argument("--kernel", required=True)
    p_bound.add_argument("--data", required=True)
    p_bound.add_argument("--shots", default="inf")
    p_bound.add_argument("--p-tilde", type=float, default=0.0)
    p_bound.add_argument("--layers", type=int, default=8)
    p_bound.add_argument("--mixing", default=kernels.MIX_INVERSE_DIM)
    p_bound.add_argument("--num-qubits", type=int, default=None)
    p_bound.add_argument("--ridge", type=float, default=0.0)
    p_bound.add_argument("--delta", type=float, default=0.05)
    p_bound.set_defaults(func=_cmd_bound)

    p_check = sub.add_parser("check", help="run the lemma/property verifier battery")
    p_check.add_argument("--trials", type=int, default=200)
    p_check.add_argument("--seed", type=int, default=0)
    p_check.set_defaults(func=_cmd_check)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
