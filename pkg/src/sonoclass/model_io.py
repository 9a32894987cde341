"""Plain-text model persistence.

A model file is line-oriented and fully self-describing: a version header,
the feature configuration echo, class names, the optional MI reduction,
the feature scaler, every pairwise SVM, and (for the wavelet method) the
sampled patch set. Floats are written with 17 significant digits so a
reload reproduces the model bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ModelFormatError
from .svm import BinarySvmModel, KernelParams, OvoModel
from .wavelet_baseline import PatchSet

MODEL_HEADER = "SONOCLASS-MODEL v1"


@dataclass(frozen=True)
class TrainedModel:
    """Everything needed to classify new audio with a persisted model."""

    ovo: OvoModel
    method: str
    config: dict[str, str]
    class_names: tuple[str, ...]
    selected_indices: np.ndarray | None = None  # raw-vector gather, or None
    selected_scores: np.ndarray | None = None   # MI bits of the kept features
    n_raw_features: int = 0
    patch_set: PatchSet | None = None


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _fmt_row(values) -> str:
    return " ".join(_fmt(v) for v in np.asarray(values, dtype=np.float64).ravel())


def save_model(path, model: TrainedModel) -> None:
    lines: list[str] = [MODEL_HEADER, f"method {model.method}"]

    lines.append(f"config {len(model.config)}")
    for key in sorted(model.config):
        lines.append(f"{key} = {model.config[key]}")

    lines.append(f"classes {len(model.class_names)}")
    for idx, name in enumerate(model.class_names):
        lines.append(f"class {idx} {name}")

    if model.selected_indices is None:
        lines.append("selection none")
    else:
        idx = np.asarray(model.selected_indices, dtype=np.int64)
        lines.append(f"selection {idx.size} {model.n_raw_features}")
        lines.append("selected " + " ".join(str(int(i)) for i in idx))
        scores = model.selected_scores
        if scores is None:
            scores = np.zeros(idx.size)
        lines.append("scores " + _fmt_row(scores))

    lo, hi = model.ovo.scaler
    lines.append(f"scaler {lo.shape[0]}")
    lines.append("min " + _fmt_row(lo))
    lines.append("max " + _fmt_row(hi))

    pairs = sorted(model.ovo.pair_models)
    lines.append(f"pairs {len(pairs)}")
    for a, b in pairs:
        bm = model.ovo.pair_models[(a, b)]
        n_sv, dim = bm.support_vectors.shape
        lines.append(f"pair {a} {b}")
        lines.append(f"params {_fmt(bm.params.gamma)} {_fmt(bm.params.c)}")
        lines.append(f"bias {_fmt(bm.bias)}")
        lines.append(f"converged {int(bm.converged)}")
        lines.append(f"sv {n_sv} {dim}")
        for row in bm.support_vectors:
            lines.append(_fmt_row(row))
        lines.append("coef " + (_fmt_row(bm.dual_coef) if n_sv else ""))

    if model.patch_set is None:
        lines.append("patches none")
    else:
        ps = model.patch_set
        lines.append(f"patches {len(ps.patches)} seed {ps.seed} sizes "
                     + " ".join(str(s) for s in ps.sizes))
        for patch, (clip, scale, u, v) in zip(ps.patches, ps.sources):
            lines.append(f"patch {patch.shape[0]} {clip} {scale} {u} {v}")
            lines.append(_fmt_row(patch))

    lines.append("end")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


class _Reader:
    def __init__(self, path):
        with open(path, "r", encoding="ascii") as fh:
            self.lines = fh.read().splitlines()
        self.pos = 0
        self.path = path

    def next(self) -> str:
        if self.pos >= len(self.lines):
            raise ModelFormatError(f"{self.path}: unexpected end of file")
        line = self.lines[self.pos]
        self.pos += 1
        return line

    def expect(self, prefix: str) -> list[str]:
        line = self.next()
        if not line.startswith(prefix):
            raise ModelFormatError(f"{self.path}: expected {prefix!r}, got {line!r}")
        return line.split()


def _floats(text: str) -> np.ndarray:
    if not text.strip():
        return np.empty(0)
    return np.array([float(tok) for tok in text.split()])


def load_model(path) -> TrainedModel:
    r = _Reader(path)
    if r.next() != MODEL_HEADER:
        raise ModelFormatError(f"{path}: missing {MODEL_HEADER!r} header")
    method = r.expect("method")[1]

    n_cfg = int(r.expect("config")[1])
    config: dict[str, str] = {}
    for _ in range(n_cfg):
        key, _, value = r.next().partition(" = ")
        config[key] = value

    n_classes = int(r.expect("classes")[1])
    class_names = []
    for _ in range(n_classes):
        parts = r.next().split(" ", 2)
        class_names.append(parts[2])

    sel_line = r.expect("selection")
    selected = scores = None
    n_raw = 0
    if sel_line[1] != "none":
        k = int(sel_line[1])
        n_raw = int(sel_line[2])
        selected = np.array([int(t) for t in r.expect("selected")[1:]], dtype=np.int64)
        scores = _floats(r.next().removeprefix("scores "))
        if selected.size != k or scores.size != k:
            raise ModelFormatError(f"{path}: selection length mismatch")

    dim = int(r.expect("scaler")[1])
    lo = _floats(r.next().removeprefix("min "))
    hi = _floats(r.next().removeprefix("max "))
    if lo.size != dim or hi.size != dim:
        raise ModelFormatError(f"{path}: scaler length mismatch")

    n_pairs = int(r.expect("pairs")[1])
    pair_models: dict[tuple[int, int], BinarySvmModel] = {}
    for _ in range(n_pairs):
        _, a, b = r.expect("pair")
        _, gamma, c = r.expect("params")
        bias = float(r.expect("bias")[1])
        converged = bool(int(r.expect("converged")[1]))
        _, n_sv, sv_dim = r.expect("sv")
        n_sv, sv_dim = int(n_sv), int(sv_dim)
        sv = np.empty((n_sv, sv_dim))
        for row in range(n_sv):
            sv[row] = _floats(r.next())
        coef = _floats(r.next().removeprefix("coef"))
        if coef.size != n_sv:
            raise ModelFormatError(f"{path}: dual coefficient length mismatch")
        pair_models[(int(a), int(b))] = BinarySvmModel(
            support_vectors=sv,
            dual_coef=coef,
            bias=bias,
            params=KernelParams(gamma=float(gamma), c=float(c)),
            converged=converged,
        )

    patch_line = r.expect("patches")
    patch_set = None
    if patch_line[1] != "none":
        n_patches = int(patch_line[1])
        seed = int(patch_line[3])
        sizes = tuple(int(t) for t in patch_line[5:])
        patches = []
        sources = []
        for _ in range(n_patches):
            _, m, clip, scale, u, v = r.expect("patch")
            m = int(m)
            flat = _floats(r.next())
            patch = flat.reshape(m, m, 3)
            patch.setflags(write=False)
            patches.append(patch)
            sources.append((int(clip), int(scale), int(u), int(v)))
        patch_set = PatchSet(
            patches=tuple(patches), sources=tuple(sources), seed=seed, sizes=sizes
        )
    if r.next() != "end":
        raise ModelFormatError(f"{path}: missing end marker")

    ovo = OvoModel(
        classes=tuple(range(n_classes)),
        pair_models=pair_models,
        scaler=(lo, hi),
        selection=None,
    )
    return TrainedModel(
        ovo=ovo,
        method=method,
        config=config,
        class_names=tuple(class_names),
        selected_indices=selected,
        selected_scores=scores,
        n_raw_features=n_raw,
        patch_set=patch_set,
    )
