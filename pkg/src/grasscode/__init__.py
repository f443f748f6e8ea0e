"""Grassmannian product codebooks for limited-feedback FD-MIMO beamforming and precoding."""
from .baseline_vq import vq_evaluate, vq_test, vq_train
from .beamforming import bf_evaluate, bf_test, bf_train, reshape_miso
from .clustering import GrassmannCodebook, ProductCodebook, kmeans, quantize, quantize_many
from .datagen import (
    ChannelSample,
    Dataset,
    gen_kron_rayleigh,
    gen_ray_channel,
    read_dataset,
    split,
    write_dataset,
)
from .errors import *  # noqa: F401,F403
from .manifold import (
    StiefelPoint,
    chordal_distance_sq,
    grassmann_centroid,
    orthonormalize,
    principal_angles,
)
from .precoding import (
    dom_col,
    mutual_information,
    pc_evaluate,
    pc_test,
    pc_train,
    quantized_precoder,
    unquantized_precoder,
)
from .tensor import TuckerFactors, fold, hooi, hosvd, mode_product, unfold

__version__ = "0.1.0"
