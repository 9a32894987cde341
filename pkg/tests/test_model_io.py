import numpy as np
import pytest

from sonoclass.errors import ModelFormatError
from sonoclass.feature_select import FeatureMatrix
from sonoclass.model_io import MODEL_HEADER, TrainedModel, load_model, save_model
from sonoclass.svm import KernelParams, ovo_predict_batch, ovo_train
from sonoclass.wavelet_baseline import PatchSet


def small_trained_model(seed=0, with_patches=False):
    rng = np.random.default_rng(seed)
    values = np.vstack([
        rng.normal(size=(8, 5)) + 0.0,
        rng.normal(size=(8, 5)) + 4.0,
        rng.normal(size=(8, 5)) + 8.0,
    ])
    labels = np.repeat(np.arange(3), 8)
    ovo = ovo_train(FeatureMatrix(values, labels), KernelParams(gamma=0.4, c=7.0), seed=1)
    patch_set = None
    if with_patches:
        patches = tuple(rng.normal(size=(m, m, 3)) for m in (4, 8))
        patch_set = PatchSet(
            patches=patches, sources=((0, 1, 2, 3), (1, 2, 0, 0)),
            seed=5, sizes=(4, 8),
        )
    return TrainedModel(
        ovo=ovo,
        method="wavelet" if with_patches else "bank",
        config={"seed": "1", "mi.top_k": "5"},
        class_names=("alpha", "beta", "gamma"),
        selected_indices=None if with_patches else np.array([4, 1, 0, 3, 2]),
        selected_scores=None if with_patches else rng.uniform(size=5),
        n_raw_features=0 if with_patches else 40,
        patch_set=patch_set,
    ), values


class TestRoundTrip:
    def test_header_line(self, tmp_path):
        model, _ = small_trained_model()
        path = tmp_path / "m.txt"
        save_model(path, model)
        assert path.read_text().splitlines()[0] == MODEL_HEADER == "SONOCLASS-MODEL v1"

    def test_predictions_survive_round_trip(self, tmp_path):
        model, values = small_trained_model()
        path = tmp_path / "m.txt"
        save_model(path, model)
        loaded = load_model(path)
        assert loaded.class_names == model.class_names
        assert loaded.method == model.method
        assert loaded.config == model.config
        assert np.array_equal(loaded.selected_indices, model.selected_indices)
        assert np.array_equal(
            ovo_predict_batch(loaded.ovo, values),
            ovo_predict_batch(model.ovo, values),
        )

    def test_float_fields_bit_exact(self, tmp_path):
        model, _ = small_trained_model(seed=3)
        path = tmp_path / "m.txt"
        save_model(path, model)
        loaded = load_model(path)
        for key in model.ovo.pair_models:
            a = model.ovo.pair_models[key]
            b = loaded.ovo.pair_models[key]
            assert np.array_equal(a.support_vectors, b.support_vectors)
            assert np.array_equal(a.dual_coef, b.dual_coef)
            assert a.bias == b.bias
        assert np.array_equal(model.ovo.scaler[0], loaded.ovo.scaler[0])
        assert np.array_equal(model.ovo.scaler[1], loaded.ovo.scaler[1])

    def test_resave_is_byte_identical(self, tmp_path):
        model, _ = small_trained_model(seed=4)
        p1, p2 = tmp_path / "a.txt", tmp_path / "b.txt"
        save_model(p1, model)
        save_model(p2, load_model(p1))
        assert p1.read_bytes() == p2.read_bytes()

    def test_patch_set_round_trip(self, tmp_path):
        model, _ = small_trained_model(seed=5, with_patches=True)
        path = tmp_path / "w.txt"
        save_model(path, model)
        loaded = load_model(path)
        assert loaded.patch_set is not None
        assert loaded.patch_set.seed == 5
        assert loaded.patch_set.sizes == (4, 8)
        assert loaded.patch_set.sources == model.patch_set.sources
        for a, b in zip(model.patch_set.patches, loaded.patch_set.patches):
            assert np.array_equal(a, b)


class TestErrors:
    def test_missing_header(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("NOT-A-MODEL\n")
        with pytest.raises(ModelFormatError):
            load_model(path)

    def test_truncated_file(self, tmp_path):
        model, _ = small_trained_model()
        path = tmp_path / "m.txt"
        save_model(path, model)
        clipped = path.read_text().splitlines()[:10]
        path.write_text("\n".join(clipped) + "\n")
        with pytest.raises(ModelFormatError):
            load_model(path)

    def test_wrong_section(self, tmp_path):
        model, _ = small_trained_model()
        path = tmp_path / "m.txt"
        save_model(path, model)
        text = path.read_text().replace("scaler", "scalar", 1)
        path.write_text(text)
        with pytest.raises(ModelFormatError):
            load_model(path)
