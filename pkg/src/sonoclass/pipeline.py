"""End-to-end glue: manifests, run configuration, feature extraction with
caching, training, evaluation, and the multi-method comparison report.

A dataset manifest is tab-separated text (path TAB label TAB split, split
one of train/test, or two fields for not-yet-split data); a JSON variant
with the same fields is accepted by extension. Run configuration is flat
`key = value` text with namespaced keys; unknown keys are rejected.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import audio_io, log_gabor, svm, wavelet_baseline
from .errors import (
    ClassTooSmall,
    ConfigError,
    DimensionMismatch,
    ExtractionError,
    ManifestError,
    SonoclassError,
)
from .feature_select import FeatureMatrix, select_top_k
from .model_io import TrainedModel
from .spectrogram import StftParams, log_spectrogram, to_fixed
from .svm import KernelParams, grid_search_cv, ovo_predict_batch, ovo_train
from .wavelet_baseline import PatchSet, c1_pyramid, sample_patches

METHODS = ("single", "bank", "patches", "wavelet")
TRAIN_FRACTION = 2.0 / 3.0


# --------------------------------------------------------------------------
# Manifest
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ManifestEntry:
    path: str
    label: str
    split: str = ""  # "train", "test", or "" when not yet assigned


@dataclass(frozen=True)
class DatasetManifest:
    entries: tuple[ManifestEntry, ...]

    def __post_init__(self):
        paths = [e.path for e in self.entries]
        if len(set(paths)) != len(paths):
            raise ManifestError("duplicate paths in manifest")
        for e in self.entries:
            if not e.label:
                raise ManifestError(f"{e.path}: empty label")
            if e.split not in ("", "train", "test"):
                raise ManifestError(f"{e.path}: bad split {e.split!r}")

    @property
    def classes(self) -> tuple[str, ...]:
        return tuple(sorted({e.label for e in self.entries}))

    def rows(self, split: str) -> tuple[ManifestEntry, ...]:
        return tuple(e for e in self.entries if e.split == split)

    def split_hash(self) -> str:
        text = "\n".join(f"{e.path}\t{e.split}" for e in sorted(self.entries, key=lambda e: e.path))
        return hashlib.sha256(text.encode()).hexdigest()[:16]


def read_manifest(path) -> DatasetManifest:
    path = Path(path)
    if not path.exists():
        raise ManifestError(f"manifest not found: {path}")
    if path.suffix.lower() == ".json":
        try:
            doc = json.loads(path.read_text())
            entries = tuple(
                ManifestEntry(str(e["path"]), str(e["label"]), str(e.get("split", "")))
                for e in doc["entries"]
            )
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ManifestError(f"{path}: {exc}") from exc
        return DatasetManifest(entries=entries)

    entries = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) == 2:
            entries.append(ManifestEntry(parts[0], parts[1]))
        elif len(parts) == 3:
            entries.append(ManifestEntry(parts[0], parts[1], parts[2]))
        else:
            raise ManifestError(f"{path}:{lineno}: expected 2 or 3 tab-separated fields")
    return DatasetManifest(entries=tuple(entries))


def write_manifest(path, manifest: DatasetManifest) -> None:
    path = Path(path)
    if path.suffix.lower() == ".json":
        doc = {"entries": [
            {"path": e.path, "label": e.label, "split": e.split} for e in manifest.entries
        ]}
        path.write_text(json.dumps(doc, indent=2) + "\n")
        return
    lines = [
        f"{e.path}\t{e.label}\t{e.split}" if e.split else f"{e.path}\t{e.label}"
        for e in manifest.entries
    ]
    path.write_text("\n".join(lines) + "\n")


def auto_split(
    manifest: DatasetManifest,
    train_fraction: float = TRAIN_FRACTION,
    seed: int = 0,
) -> DatasetManifest:
    """Assign stratified train/test splits: ceil(fraction * n) per class to train."""
    by_class: dict[str, list[int]] = {}
    for i, e in enumerate(manifest.entries):
        by_class.setdefault(e.label, []).append(i)
    rng = np.random.default_rng(seed)
    split = [""] * len(manifest.entries)
    for label in sorted(by_class):
        rows = by_class[label]
        if len(rows) < 3:
            raise ClassTooSmall(f"class {label!r} has only {len(rows)} entries")
        n_train = int(np.ceil(train_fraction * len(rows)))
        order = rng.permutation(len(rows))
        for rank, j in enumerate(order):
            split[rows[j]] = "train" if rank < n_train else "test"
    entries = tuple(
        replace(e, split=s) for e, s in zip(manifest.entries, split)
    )
    return DatasetManifest(entries=entries)


# --------------------------------------------------------------------------
# Run configuration
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    method: str = "bank"
    seed: int = 0
    frame_size: int = 256
    hop: int = 64
    log_floor: float = 1e-10
    fixed_rows: int = 128
    fixed_cols: int = 128
    gabor_scales: int = 2
    gabor_orientations: int = 6
    gabor_f0: tuple[float, ...] = ()  # empty = one octave below 1/3 per extra scale
    gabor_sigma_ratio: float = 0.65
    gabor_sigma_theta: float = 0.6545
    single_scale: int = 1
    single_orientation: int = 1
    wavelet_patches: int = 200
    wavelet_sizes: tuple[int, ...] = (4, 8, 12)
    mi_n_bins: int = 16
    mi_top_k: int = 256
    svm_c: float = 10.0
    svm_gamma: float = 0.5
    svm_tol: float = 1e-3
    svm_max_passes: int = 200
    grid_c: tuple[float, ...] = ()      # empty = library default grid
    grid_gamma: tuple[float, ...] = ()
    grid_folds: int = 5

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        if not self.wavelet_sizes or any(s < 1 for s in self.wavelet_sizes):
            raise ConfigError("wavelet.sizes needs at least one positive size")

    def stft_params(self) -> StftParams:
        return StftParams(frame_size=self.frame_size, hop=self.hop, log_floor=self.log_floor)

    def gabor_params(self) -> log_gabor.LogGaborParams:
        f0 = self.gabor_f0
        if not f0:
            f0 = tuple((1.0 / 3.0) / 2 ** i for i in range(self.gabor_scales))
        return log_gabor.LogGaborParams(
            n_scales=self.gabor_scales,
            n_orientations=self.gabor_orientations,
            f0_per_scale=f0,
            sigma_ratio=self.gabor_sigma_ratio,
            sigma_theta=self.gabor_sigma_theta,
        )

    def kernel_params(self) -> KernelParams:
        return KernelParams(gamma=self.svm_gamma, c=self.svm_c)


def _parse_float_tuple(text: str) -> tuple[float, ...]:
    text = text.strip()
    if not text or text == "auto":
        return ()
    return tuple(float(tok) for tok in text.split(","))


def _parse_int_tuple(text: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in text.strip().split(",")) if text.strip() else ()


def _fmt_value(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, tuple):
        return ",".join(_fmt_value(v) for v in value) if value else "auto"
    return str(value)


# flat config key -> (RunConfig field, parser)
_CONFIG_KEYS = {
    "method": ("method", str),
    "seed": ("seed", int),
    "stft.frame_size": ("frame_size", int),
    "stft.hop": ("hop", int),
    "stft.log_floor": ("log_floor", float),
    "fixed.rows": ("fixed_rows", int),
    "fixed.cols": ("fixed_cols", int),
    "gabor.scales": ("gabor_scales", int),
    "gabor.orientations": ("gabor_orientations", int),
    "gabor.f0": ("gabor_f0", _parse_float_tuple),
    "gabor.sigma_ratio": ("gabor_sigma_ratio", float),
    "gabor.sigma_theta": ("gabor_sigma_theta", float),
    "single.scale": ("single_scale", int),
    "single.orientation": ("single_orientation", int),
    "wavelet.patches": ("wavelet_patches", int),
    "wavelet.sizes": ("wavelet_sizes", _parse_int_tuple),
    "mi.n_bins": ("mi_n_bins", int),
    "mi.top_k": ("mi_top_k", int),
    "svm.c": ("svm_c", float),
    "svm.gamma": ("svm_gamma", float),
    "svm.tol": ("svm_tol", float),
    "svm.max_passes": ("svm_max_passes", int),
    "grid.c": ("grid_c", _parse_float_tuple),
    "grid.gamma": ("grid_gamma", _parse_float_tuple),
    "grid.folds": ("grid_folds", int),
}
_FIELD_TO_KEY = {field_name: key for key, (field_name, _) in _CONFIG_KEYS.items()}


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    """Flat `key = value` lines; '#' starts a comment; unknown keys fail."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        values[key] = value.strip()
    return values


def config_from_flat(flat: dict[str, str]) -> RunConfig:
    kwargs = {}
    for key, value in flat.items():
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        field_name, parser = _CONFIG_KEYS[key]
        try:
            kwargs[field_name] = parser(value)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {value!r}") from exc
    return RunConfig(**kwargs)


def load_config(path=None, overrides: dict[str, str] | None = None) -> RunConfig:
    flat: dict[str, str] = {}
    if path is not None:
        text = Path(path).read_text()
        flat.update(parse_config_text(text, source=str(path)))
    if overrides:
        for key in overrides:
            if key not in _CONFIG_KEYS:
                raise ConfigError(f"unknown config key {key!r}")
        flat.update(overrides)
    return config_from_flat(flat)


def config_to_flat(config: RunConfig) -> dict[str, str]:
    """Canonical flat echo of every key (used for model files and hashing)."""
    out = {}
    for f in fields(RunConfig):
        out[_FIELD_TO_KEY[f.name]] = _fmt_value(getattr(config, f.name))
    return out


# --------------------------------------------------------------------------
# Feature extraction with caching
# --------------------------------------------------------------------------

_FIXED_KEYS = ("stft.frame_size", "stft.hop", "stft.log_floor", "fixed.rows", "fixed.cols")
_GABOR_KEYS = _FIXED_KEYS + (
    "method", "gabor.scales", "gabor.orientations", "gabor.f0",
    "gabor.sigma_ratio", "gabor.sigma_theta", "single.scale", "single.orientation",
)


def _subset_hash(flat: dict[str, str], keys) -> str:
    text = "\n".join(f"{k}={flat[k]}" for k in keys)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _content_hash(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]


@dataclass
class CacheStats:
    hits: int = 0
    misses: int = 0


class FeatureExtractor:
    """Per-clip feature computation with an optional on-disk cache.

    Cached artifacts are keyed by (audio content hash, config hash), so a
    parameter change invalidates exactly the affected stage.
    """

    def __init__(self, config: RunConfig, cache_dir=None):
        self.config = config
        self.cache_dir = Path(cache_dir) if cache_dir else None
        self.stats = CacheStats()
        flat = config_to_flat(config)
        self._fixed_hash = _subset_hash(flat, _FIXED_KEYS)
        self._feature_hash = _subset_hash(flat, _GABOR_KEYS)
        self._bank = None
        self._stft_params = config.stft_params()

    @property
    def bank(self) -> log_gabor.LogGaborBank:
        if self._bank is None:
            self._bank = log_gabor.build_bank(
                (self.config.fixed_rows, self.config.fixed_cols), self.config.gabor_params()
            )
        return self._bank

    def _cache_path(self, stage: str, stage_hash: str, content: str, ext: str) -> Path | None:
        if self.cache_dir is None:
            return None
        return self.cache_dir / stage / stage_hash / f"{content}{ext}"

    def fixed_values(self, path, content: str | None = None) -> np.ndarray:
        content = content or _content_hash(path)
        cached = self._cache_path("fixed", self._fixed_hash, content, ".npy")
        if cached is not None and cached.exists():
            return np.load(cached)
        clip = audio_io.peak_normalize(audio_io.load_wav(path))
        spec = log_spectrogram(clip, self._stft_params)
        fixed = to_fixed(spec, self.config.fixed_rows, self.config.fixed_cols)
        if cached is not None:
            cached.parent.mkdir(parents=True, exist_ok=True)
            np.save(cached, fixed.values)
        return fixed.values

    def c1(self, path, content: str | None = None) -> list[np.ndarray]:
        content = content or _content_hash(path)
        cached = self._cache_path("c1", self._fixed_hash, content, ".npz")
        if cached is not None and cached.exists():
            self.stats.hits += 1
            with np.load(cached) as data:
                return [data[f"scale{j}"] for j in wavelet_baseline.SCALES]
        self.stats.misses += 1
        pyramid = c1_pyramid(self.fixed_values(path, content))
        if cached is not None:
            cached.parent.mkdir(parents=True, exist_ok=True)
            np.savez(cached, **{
                f"scale{j}": plane for j, plane in zip(wavelet_baseline.SCALES, pyramid)
            })
        return pyramid

    def gabor_feature(self, path) -> np.ndarray:
        content = _content_hash(path)
        cached = self._cache_path("feat", self._feature_hash, content, ".npy")
        if cached is not None and cached.exists():
            self.stats.hits += 1
            return np.load(cached)
        self.stats.misses += 1
        fixed = self.fixed_values(path, content)
        cfg = self.config
        if cfg.method == "single":
            vec = log_gabor.single_filter_feature(
                fixed, self.bank, cfg.single_scale, cfg.single_orientation
            )
        elif cfg.method == "bank":
            vec = log_gabor.bank_average_feature(fixed, self.bank)
        elif cfg.method == "patches":
            vec = log_gabor.band_patch_feature(fixed, self.bank)
        else:
            raise ConfigError(f"not a log-Gabor method: {cfg.method}")
        if cached is not None:
            cached.parent.mkdir(parents=True, exist_ok=True)
            np.save(cached, vec)
        return vec

    def wavelet_feature(self, path, patch_set: PatchSet) -> np.ndarray:
        # C1 pyramids are cached per clip; the patch correlation depends on
        # the training-sampled patches and is recomputed per run.
        return wavelet_baseline.global_max(
            wavelet_baseline.patch_transform(self.c1(path), patch_set)
        )


@dataclass
class ExtractResult:
    train: FeatureMatrix | None
    test: FeatureMatrix | None
    class_names: tuple[str, ...]
    patch_set: PatchSet | None
    stats: CacheStats


def _collect(entries, fn, failures: list[str] | None = None) -> list:
    """Apply fn to every entry; failures abort the run with every one listed.

    With an external `failures` list the raise is deferred to the caller so
    errors from several batches can be reported together.
    """
    deferred = failures is not None
    failures = [] if failures is None else failures
    out = []
    for e in entries:
        try:
            out.append(fn(e))
        except (SonoclassError, OSError) as exc:
            failures.append(f"{e.path}: {exc}")
    if failures and not deferred:
        raise ExtractionError(
            f"{len(failures)} file(s) failed:\n" + "\n".join(failures)
        )
    return out


def extract_features(
    manifest: DatasetManifest,
    config: RunConfig,
    cache_dir=None,
    patch_set: PatchSet | None = None,
    splits: tuple[str, ...] = ("train", "test"),
) -> ExtractResult:
    """Run the per-clip pipeline for the requested manifest splits.

    Rows follow manifest order within each split. For the wavelet method a
    missing patch_set is sampled from the training rows' C1 pyramids with
    the configured seed.
    """
    extractor = FeatureExtractor(config, cache_dir)
    class_names = manifest.classes
    label_index = {name: i for i, name in enumerate(class_names)}

    matrices: dict[str, FeatureMatrix | None] = {"train": None, "test": None}
    if config.method == "wavelet":
        if patch_set is None:
            train_rows = manifest.rows("train")
            if not train_rows:
                raise ManifestError("wavelet method needs a non-empty train split to sample patches")
            train_c1 = _collect(train_rows, lambda e: extractor.c1(e.path))
            patch_set = sample_patches(
                train_c1,
                n_patches=config.wavelet_patches,
                sizes=config.wavelet_sizes,
                seed=config.seed,
            )
        ps = patch_set
        feature_fn = lambda e: extractor.wavelet_feature(e.path, ps)
    else:
        feature_fn = lambda e: extractor.gabor_feature(e.path)

    failures: list[str] = []
    collected: dict[str, list] = {}
    for split in splits:
        rows = manifest.rows(split)
        if rows:
            collected[split] = _collect(rows, feature_fn, failures)
    if failures:
        raise ExtractionError(
            f"{len(failures)} file(s) failed:\n" + "\n".join(failures)
        )
    for split, vectors in collected.items():
        rows = manifest.rows(split)
        labels = np.array([label_index[e.label] for e in rows], dtype=np.int64)
        matrices[split] = FeatureMatrix(values=np.vstack(vectors), labels=labels)

    return ExtractResult(
        train=matrices["train"],
        test=matrices["test"],
        class_names=class_names,
        patch_set=patch_set,
        stats=extractor.stats,
    )


# --------------------------------------------------------------------------
# Train / evaluate / grid search / compare
# --------------------------------------------------------------------------

def train_model(
    manifest: DatasetManifest,
    config: RunConfig,
    cache_dir=None,
    patch_set: PatchSet | None = None,
) -> TrainedModel:
    """Fit MI selection (log-Gabor methods), the scaler, and all pair SVMs."""
    result = extract_features(
        manifest, config, cache_dir=cache_dir, patch_set=patch_set, splits=("train",)
    )
    if result.train is None:
        raise ManifestError("manifest has no train rows")

    selection = None
    matrix = result.train
    selected_indices = selected_scores = None
    n_raw = matrix.n_features
    if config.method != "wavelet":
        selection = select_top_k(matrix, k=config.mi_top_k, n_bins=config.mi_n_bins)
        matrix = FeatureMatrix(
            values=matrix.values[:, selection.selected], labels=matrix.labels
        )
        selected_indices = selection.selected
        selected_scores = selection.scores[selection.selected]

    ovo = ovo_train(
        matrix,
        config.kernel_params(),
        tol=config.svm_tol,
        max_passes=config.svm_max_passes,
        seed=config.seed,
        selection=selection,
    )
    return TrainedModel(
        ovo=ovo,
        method=config.method,
        config=config_to_flat(config),
        class_names=result.class_names,
        selected_indices=selected_indices,
        selected_scores=selected_scores,
        n_raw_features=n_raw,
        patch_set=result.patch_set if config.method == "wavelet" else None,
    )


@dataclass
class EvaluationReport:
    class_names: tuple[str, ...]
    confusion: np.ndarray                 # (k, k) counts, rows = truth
    per_class_accuracy: dict[str, float]  # percentages
    averaged_accuracy: float              # unweighted mean of per-class values
    sample_weighted_accuracy: float       # plain correct/total
    n_test: int
    method: str
    metadata: dict[str, str] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)


def evaluate_model(
    model: TrainedModel,
    manifest: DatasetManifest,
    cache_dir=None,
) -> EvaluationReport:
    """Classify the manifest's test rows and tabulate accuracies."""
    config = config_from_flat(model.config)
    test_rows = manifest.rows("test")
    if not test_rows:
        raise ManifestError("manifest has no test rows")
    label_index = {name: i for i, name in enumerate(model.class_names)}
    unknown = sorted({e.label for e in test_rows} - set(model.class_names))
    if unknown:
        raise ManifestError(f"labels not in the model: {unknown}")

    t0 = time.perf_counter()
    extractor = FeatureExtractor(config, cache_dir)
    if model.method == "wavelet":
        if model.patch_set is None:
            raise DimensionMismatch("wavelet model carries no patch set")
        vectors = _collect(
            test_rows, lambda e: extractor.wavelet_feature(e.path, model.patch_set)
        )
    else:
        vectors = _collect(test_rows, lambda e: extractor.gabor_feature(e.path))
    values = np.vstack(vectors)
    t_features = time.perf_counter() - t0

    if model.selected_indices is not None:
        if values.shape[1] != model.n_raw_features:
            raise DimensionMismatch(
                f"extracted {values.shape[1]} features, model expects {model.n_raw_features}"
            )
        values = values[:, model.selected_indices]
    if values.shape[1] != model.ovo.n_features:
        raise DimensionMismatch(
            f"{values.shape[1]} features after selection, model expects {model.ovo.n_features}"
        )

    truth = np.array([label_index[e.label] for e in test_rows], dtype=np.int64)
    t0 = time.perf_counter()
    predicted = ovo_predict_batch(model.ovo, values)
    t_predict = time.perf_counter() - t0

    return tabulate_report(
        truth, predicted, model.class_names,
        method=model.method,
        metadata={
            "split_hash": manifest.split_hash(),
            "seed": model.config.get("seed", ""),
            "config": ";".join(f"{k}={v}" for k, v in sorted(model.config.items())),
        },
        timings={"features_s": t_features, "predict_s": t_predict},
    )


def tabulate_report(
    truth: np.ndarray,
    predicted: np.ndarray,
    class_names: tuple[str, ...],
    method: str = "",
    metadata: dict[str, str] | None = None,
    timings: dict[str, float] | None = None,
) -> EvaluationReport:
    """Confusion matrix and accuracies from parallel truth/prediction labels.

    Per-class accuracy covers only classes present in truth; the averaged
    accuracy is their unweighted mean, reported next to the plain
    sample-weighted accuracy.
    """
    k = len(class_names)
    confusion = np.zeros((k, k), dtype=np.int64)
    for t, p in zip(truth, predicted):
        confusion[t, p] += 1
    per_class = {}
    for i, name in enumerate(class_names):
        total = int(confusion[i].sum())
        if total:
            per_class[name] = 100.0 * confusion[i, i] / total
    averaged = float(np.mean(list(per_class.values()))) if per_class else 0.0
    weighted = 100.0 * float(np.trace(confusion)) / max(len(truth), 1)
    return EvaluationReport(
        class_names=class_names,
        confusion=confusion,
        per_class_accuracy=per_class,
        averaged_accuracy=averaged,
        sample_weighted_accuracy=weighted,
        n_test=len(truth),
        method=method,
        metadata=metadata or {},
        timings=timings or {},
    )


def grid_search(
    manifest: DatasetManifest,
    config: RunConfig,
    cache_dir=None,
) -> tuple[KernelParams, list[tuple[float, float, float]]]:
    """Cross-validated (C, gamma) search on the training split's features."""
    result = extract_features(manifest, config, cache_dir=cache_dir, splits=("train",))
    if result.train is None:
        raise ManifestError("manifest has no train rows")
    matrix = result.train
    if config.method != "wavelet":
        selection = select_top_k(matrix, k=config.mi_top_k, n_bins=config.mi_n_bins)
        matrix = FeatureMatrix(matrix.values[:, selection.selected], matrix.labels)
    c_grid = config.grid_c or svm.DEFAULT_C_GRID
    gamma_grid = config.grid_gamma or svm.DEFAULT_GAMMA_GRID
    return grid_search_cv(
        matrix, c_grid, gamma_grid,
        folds=config.grid_folds, seed=config.seed,
        tol=config.svm_tol, max_passes=config.svm_max_passes,
    )


@dataclass
class ComparisonResult:
    grid_reports: list[tuple[int, int, EvaluationReport]]  # (scale, orientation, report)
    method_reports: dict[str, EvaluationReport]            # bank / patches / wavelet
    class_names: tuple[str, ...]
    split_hash: str


def compare_methods(
    manifest: DatasetManifest,
    config: RunConfig,
    cache_dir=None,
) -> ComparisonResult:
    """Evaluate every single-filter configuration plus the three multi-filter
    methods on one shared split. Reporting only; nothing is asserted about
    which method wins."""
    grid_reports = []
    base = replace(config, method="single")
    for scale in range(1, config.gabor_scales + 1):
        for orientation in range(1, config.gabor_orientations + 1):
            cfg = replace(base, single_scale=scale, single_orientation=orientation)
            model = train_model(manifest, cfg, cache_dir=cache_dir)
            grid_reports.append(
                (scale, orientation, evaluate_model(model, manifest, cache_dir=cache_dir))
            )

    method_reports = {}
    for method in ("bank", "patches", "wavelet"):
        cfg = replace(config, method=method)
        model = train_model(manifest, cfg, cache_dir=cache_dir)
        method_reports[method] = evaluate_model(model, manifest, cache_dir=cache_dir)

    return ComparisonResult(
        grid_reports=grid_reports,
        method_reports=method_reports,
        class_names=manifest.classes,
        split_hash=manifest.split_hash(),
    )


# --------------------------------------------------------------------------
# Report rendering (machine-readable CSVs carry no timing fields)
# --------------------------------------------------------------------------

def _pct(value: float) -> str:
    return format(value, ".6f")


def evaluation_csv(report: EvaluationReport) -> str:
    lines = ["kind,truth,predicted,value"]
    for name in report.class_names:
        if name in report.per_class_accuracy:
            lines.append(f"per_class,{name},,{_pct(report.per_class_accuracy[name])}")
    lines.append(f"averaged,,,{_pct(report.averaged_accuracy)}")
    lines.append(f"sample_weighted,,,{_pct(report.sample_weighted_accuracy)}")
    lines.append(f"n_test,,,{report.n_test}")
    lines.append(f"method,,,{report.method}")
    lines.append(f"split_hash,,,{report.metadata.get('split_hash', '')}")
    for i, truth in enumerate(report.class_names):
        for j, pred in enumerate(report.class_names):
            lines.append(f"confusion,{truth},{pred},{report.confusion[i, j]}")
    return "\n".join(lines) + "\n"


def evaluation_text(report: EvaluationReport) -> str:
    width = max(len(n) for n in report.class_names)
    lines = [f"method: {report.method}    test clips: {report.n_test}", ""]
    lines.append(f"{'class'.ljust(width)}  correct/total  accuracy")
    for i, name in enumerate(report.class_names):
        total = int(report.confusion[i].sum())
        if not total:
            continue
        correct = int(report.confusion[i, i])
        lines.append(
            f"{name.ljust(width)}  {correct:>4d}/{total:<4d}     "
            f"{report.per_class_accuracy[name]:6.2f}%"
        )
    lines.append("")
    lines.append(f"averaged accuracy (unweighted): {report.averaged_accuracy:.2f}%")
    lines.append(f"sample-weighted accuracy:       {report.sample_weighted_accuracy:.2f}%")
    lines.append("")
    lines.append("confusion (rows = truth):")
    header = " " * width + "  " + " ".join(n[:6].rjust(6) for n in report.class_names)
    lines.append(header)
    for i, name in enumerate(report.class_names):
        row = " ".join(str(int(v)).rjust(6) for v in report.confusion[i])
        lines.append(f"{name.ljust(width)}  {row}")
    if report.metadata.get("config"):
        lines.append("")
        lines.append(f"config: {report.metadata['config']}")
    if report.timings:
        lines.append("")
        lines.append("timings: " + "  ".join(
            f"{k}={v:.2f}" for k, v in report.timings.items()
        ))
    return "\n".join(lines) + "\n"


def single_grid_csv(result: ComparisonResult) -> str:
    header = "scale,orientation," + ",".join(result.class_names) + ",averaged"
    lines = [header]
    for scale, orientation, report in result.grid_reports:
        cells = [
            _pct(report.per_class_accuracy.get(name, float("nan")))
            for name in result.class_names
        ]
        lines.append(
            f"{scale},{orientation}," + ",".join(cells) + f",{_pct(report.averaged_accuracy)}"
        )
    return "\n".join(lines) + "\n"


def comparison_csv(result: ComparisonResult) -> str:
    methods = list(result.method_reports)
    lines = ["class," + ",".join(methods)]
    for name in result.class_names:
        cells = [
            _pct(result.method_reports[m].per_class_accuracy.get(name, float("nan")))
            for m in methods
        ]
        lines.append(f"{name}," + ",".join(cells))
    lines.append("averaged," + ",".join(
        _pct(result.method_reports[m].averaged_accuracy) for m in methods
    ))
    lines.append("sample_weighted," + ",".join(
        _pct(result.method_reports[m].sample_weighted_accuracy) for m in methods
    ))
    lines.append(f"split_hash,{result.split_hash}" + "," * (len(methods) - 1))
    return "\n".join(lines) + "\n"


def comparison_text(result: ComparisonResult) -> str:
    lines = ["single-filter grid (per-class accuracy %):", ""]
    width = max(len(n) for n in result.class_names)
    head = "scale orient  " + "  ".join(n[:7].rjust(7) for n in result.class_names) + "  averaged"
    lines.append(head)
    for scale, orientation, report in result.grid_reports:
        cells = "  ".join(
            f"{report.per_class_accuracy.get(name, float('nan')):7.2f}"
            for name in result.class_names
        )
        lines.append(f"{scale:>5d} {orientation:>6d}  {cells}  {report.averaged_accuracy:8.2f}")
    lines.append("")
    lines.append("method comparison (per-class accuracy %):")
    lines.append("")
    methods = list(result.method_reports)
    lines.append("class".ljust(width) + "  " + "  ".join(m.rjust(8) for m in methods))
    for name in result.class_names:
        cells = "  ".join(
            f"{result.method_reports[m].per_class_accuracy.get(name, float('nan')):8.2f}"
            for m in methods
        )
        lines.append(name.ljust(width) + "  " + cells)
    lines.append("averaged".ljust(width) + "  " + "  ".join(
        f"{result.method_reports[m].averaged_accuracy:8.2f}" for m in methods
    ))
    lines.append(f"\nsplit hash: {result.split_hash}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# Synthetic corpus
# --------------------------------------------------------------------------

def generate_corpus(
    out_dir,
    clips_per_class: int = 60,
    duration_s: float = 1.0,
    sample_rate: int = 16000,
    seed: int = 0,
) -> DatasetManifest:
    """Write one WAV per clip for each synthetic class; returns the
    (not yet split) manifest."""
    out_dir = Path(out_dir)
    entries = []
    for kind in audio_io.SYNTH_KINDS:
        kind_dir = out_dir / kind
        kind_dir.mkdir(parents=True, exist_ok=True)
        for i in range(clips_per_class):
            clip = audio_io.synthesize_clip(kind, duration_s, sample_rate, seed + i)
            path = kind_dir / f"{kind}_{i:03d}.wav"
            audio_io.save_wav(path, clip)
            entries.append(ManifestEntry(path=str(path), label=kind))
    return DatasetManifest(entries=tuple(entries))
