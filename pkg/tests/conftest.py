import struct
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for qp_oracle

from sonoclass import pipeline


def make_wav_bytes(fmt_tag, channels, rate, bits, data, extra=b""):
    """Assemble a minimal RIFF/WAVE blob for loader tests."""
    fmt = struct.pack(
        "<HHIIHH", fmt_tag, channels, rate,
        rate * channels * (bits // 8), channels * (bits // 8), bits,
    ) + extra
    chunks = b"fmt " + struct.pack("<I", len(fmt)) + fmt
    if len(fmt) % 2:
        chunks += b"\x00"
    chunks += b"data" + struct.pack("<I", len(data)) + data
    if len(data) % 2:
        chunks += b"\x00"
    return b"RIFF" + struct.pack("<I", 4 + len(chunks)) + b"WAVE" + chunks


@pytest.fixture
def wav_file(tmp_path):
    def write(name, blob):
        path = tmp_path / name
        path.write_bytes(blob)
        return path
    return write


@pytest.fixture(scope="session")
def mini_corpus(tmp_path_factory):
    """4 classes x 6 short clips, split 2/3, with a shared cache dir."""
    root = tmp_path_factory.mktemp("mini_corpus")
    manifest = pipeline.generate_corpus(
        root / "clips", clips_per_class=6, duration_s=0.25, sample_rate=8000, seed=100
    )
    manifest = pipeline.auto_split(manifest, seed=1)
    return {"manifest": manifest, "root": root, "cache": str(root / "cache")}


@pytest.fixture(scope="session")
def mini_config():
    return pipeline.RunConfig(
        method="bank", seed=1, mi_top_k=32, svm_c=8.0, svm_gamma=0.5,
        wavelet_patches=30,
    )
