"""Environmental-sound spectrogram classification toolkit.

Feature extraction treats log-spectrograms as textures: a log-Gabor
filter bank (single-filter, averaged-bank, and frequency-band variants)
plus a translation-invariant wavelet baseline, followed by mutual-
information feature selection and a one-against-one RBF SVM trained with
an SMO dual solver.
"""

from .audio_io import AudioClip, load_wav, peak_normalize, save_wav, synthesize_clip
from .feature_select import (
    FeatureMatrix,
    MiSelection,
    apply_selection,
    discretize,
    mutual_information,
    select_top_k,
)
from .log_gabor import (
    LogGaborBank,
    LogGaborParams,
    apply_filter,
    average_bank,
    band_patch_feature,
    bank_average_feature,
    build_bank,
    single_filter_feature,
)
from .model_io import TrainedModel, load_model, save_model
from .pipeline import (
    DatasetManifest,
    EvaluationReport,
    ManifestEntry,
    RunConfig,
    auto_split,
    compare_methods,
    evaluate_model,
    extract_features,
    generate_corpus,
    grid_search,
    read_manifest,
    train_model,
    write_manifest,
)
from .spectrogram import (
    FixedSpectrogram,
    Spectrogram,
    StftParams,
    log_magnitude,
    log_spectrogram,
    stft,
    to_fixed,
)
from .svm import (
    BinarySvmModel,
    KernelParams,
    OvoModel,
    decision_value,
    grid_search_cv,
    ovo_predict,
    ovo_train,
    rbf_kernel,
    smo_train,
)
from .wavelet_baseline import (
    PatchSet,
    TiwtCoeffs,
    c2_features,
    global_max,
    local_max,
    normalize_scale,
    patch_transform,
    sample_patches,
    tiwt,
)

__version__ = "0.1.0"
