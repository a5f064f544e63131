"""The trainable network: tanh MLP encoder, classifier head, projection head.

The classifier emits ``k + 1`` logits by default — the k in-distribution
classes plus one explicit outlier class stored at index k (the last position).
The outlier-exposure baseline instead uses a plain k-way head
(``outlier_class=False``).

The projection head (affine -> tanh -> affine, then row L2-normalization) maps
the penultimate activation to a unit-norm embedding used by the contrastive
and margin losses. Normalizing embeddings and prototype rows keeps the
temperature-scaled dot products bounded; this is an implementation choice,
documented here because nothing else pins it down.

All parameters live in plain float64 arrays; ``backward`` implements the full
hand-derived reverse pass, validated against finite differences in the tests.
"""

from dataclasses import dataclass, field

import numpy as np

from coclearn import _kernels as K
from coclearn.errors import ShapeError, ValidationError


@dataclass(frozen=True)
class ModelConfig:
    input_dim: int
    num_id_classes: int
    hidden_dims: tuple[int, ...] = (64, 64)
    embed_dim: int = 16
    outlier_class: bool = True  # False: k-way head for the outlier-exposure baseline

    def __post_init__(self):
        if self.num_id_classes < 2:
            raise ValidationError("need at least 2 in-distribution classes")
        if self.embed_dim < 2:
            raise ValidationError("embed_dim must be >= 2")
        if not self.hidden_dims:
            raise ValidationError("hidden_dims must be non-empty")
        if self.input_dim < 1:
            raise ValidationError("input_dim must be >= 1")
        object.__setattr__(self, "hidden_dims", tuple(int(h) for h in self.hidden_dims))

    @property
    def num_logits(self) -> int:
        return self.num_id_classes + (1 if self.outlier_class else 0)

    @property
    def outlier_index(self) -> int:
        if not self.outlier_class:
            raise ValidationError("this model has no outlier class")
        return self.num_id_classes


@dataclass
class ModelParams:
    """Weights for the encoder, classifier head, and projection head.

    ``array_items`` fixes the flattening order used by the optimizer and the
    checkpoint format; extend it only at the end.
    """

    encoder_weights: list[np.ndarray]
    encoder_biases: list[np.ndarray]
    classifier_weight: np.ndarray
    classifier_bias: np.ndarray
    proj_weight1: np.ndarray
    proj_bias1: np.ndarray
    proj_weight2: np.ndarray
    proj_bias2: np.ndarray

    def array_items(self) -> list[tuple[str, np.ndarray]]:
        items = []
        for i, (w, b) in enumerate(zip(self.encoder_weights, self.encoder_biases)):
            items.append((f"encoder_weights.{i}", w))
            items.append((f"encoder_biases.{i}", b))
        items += [
            ("classifier_weight", self.classifier_weight),
            ("classifier_bias", self.classifier_bias),
            ("proj_weight1", self.proj_weight1),
            ("proj_bias1", self.proj_bias1),
            ("proj_weight2", self.proj_weight2),
            ("proj_bias2", self.proj_bias2),
        ]
        return items

    def arrays(self) -> list[np.ndarray]:
        return [a for _, a in self.array_items()]

    def copy(self) -> "ModelParams":
        return ModelParams(
            encoder_weights=[w.copy() for w in self.encoder_weights],
            encoder_biases=[b.copy() for b in self.encoder_biases],
            classifier_weight=self.classifier_weight.copy(),
            classifier_bias=self.classifier_bias.copy(),
            proj_weight1=self.proj_weight1.copy(),
            proj_bias1=self.proj_bias1.copy(),
            proj_weight2=self.proj_weight2.copy(),
            proj_bias2=self.proj_bias2.copy(),
        )

    def zeros_like(self) -> "ModelParams":
        return ModelParams(
            encoder_weights=[np.zeros_like(w) for w in self.encoder_weights],
            encoder_biases=[np.zeros_like(b) for b in self.encoder_biases],
            classifier_weight=np.zeros_like(self.classifier_weight),
            classifier_bias=np.zeros_like(self.classifier_bias),
            proj_weight1=np.zeros_like(self.proj_weight1),
            proj_bias1=np.zeros_like(self.proj_bias1),
            proj_weight2=np.zeros_like(self.proj_weight2),
            proj_bias2=np.zeros_like(self.proj_bias2),
        )


def params_to_vector(params: ModelParams) -> np.ndarray:
    return np.concatenate([a.ravel() for a in params.arrays()])


def params_from_vector(template: ModelParams, vec: np.ndarray) -> ModelParams:
    out = template.copy()
    offset = 0
    for a in out.arrays():
        n = a.size
        a[...] = vec[offset : offset + n].reshape(a.shape)
        offset += n
    if offset != vec.size:
        raise ShapeError(f"vector length {vec.size} does not match parameter count {offset}")
    return out


@dataclass
class PrototypeBank:
    """One learnable unit-norm prototype row per designated tail class."""

    prototypes: np.ndarray  # (N, D), rows L2-normalized
    tail_class_ids: list[int]
    _row_of: dict[int, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.prototypes = np.ascontiguousarray(self.prototypes, dtype=np.float64)
        if self.prototypes.ndim != 2:
            raise ShapeError("prototypes must be a matrix")
        if len(self.tail_class_ids) != self.prototypes.shape[0]:
            raise ValidationError("one prototype row per tail class required")
        if len(set(self.tail_class_ids)) != len(self.tail_class_ids):
            raise ValidationError("tail class ids must be distinct")
        self._row_of = {c: i for i, c in enumerate(self.tail_class_ids)}

    def row_for_class(self, class_id: int) -> int:
        try:
            return self._row_of[class_id]
        except KeyError:
            raise ValidationError(f"class {class_id} has no prototype") from None

    def renormalize(self) -> None:
        self.prototypes, _ = K.l2_normalize_rows(self.prototypes)

    def copy(self) -> "PrototypeBank":
        return PrototypeBank(self.prototypes.copy(), list(self.tail_class_ids))


@dataclass
class ModelOutputs:
    logits: np.ndarray  # (n, num_logits)
    embeddings: np.ndarray  # (n, embed_dim), unit rows


@dataclass
class ForwardCache:
    """Activations retained by forward() for the reverse pass."""

    inputs: np.ndarray
    hidden: list[np.ndarray]  # post-tanh activation per encoder layer
    proj_hidden: np.ndarray  # post-tanh projection activation
    raw_embed: np.ndarray  # embedding before normalization
    embed_norms: np.ndarray
    outputs: ModelOutputs


def _init_affine(rng: np.random.Generator, fan_in: int, fan_out: int):
    # Fan-in-scaled uniform: W ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), zero bias.
    limit = 1.0 / np.sqrt(fan_in)
    w = rng.uniform(-limit, limit, size=(fan_in, fan_out))
    return w, np.zeros(fan_out)


def init_params(config: ModelConfig, rng: np.random.Generator) -> ModelParams:
    """Draw fresh weights; same generator state always gives identical params."""
    dims = (config.input_dim, *config.hidden_dims)
    enc_w, enc_b = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        w, b = _init_affine(rng, fan_in, fan_out)
        enc_w.append(w)
        enc_b.append(b)
    penultimate = config.hidden_dims[-1]
    cls_w, cls_b = _init_affine(rng, penultimate, config.num_logits)
    pw1, pb1 = _init_affine(rng, penultimate, penultimate)
    pw2, pb2 = _init_affine(rng, penultimate, config.embed_dim)
    return ModelParams(enc_w, enc_b, cls_w, cls_b, pw1, pb1, pw2, pb2)


def init_prototypes(
    num_tail: int, embed_dim: int, rng: np.random.Generator, tail_class_ids=None
) -> PrototypeBank:
    """Prototype rows start as i.i.d. random unit directions."""
    if num_tail < 1:
        raise ValidationError("need at least one tail class for a prototype bank")
    raw = rng.standard_normal((num_tail, embed_dim))
    rows, _ = K.l2_normalize_rows(raw)
    if tail_class_ids is None:
        tail_class_ids = list(range(num_tail))
    return PrototypeBank(rows, list(tail_class_ids))


def forward(params: ModelParams, batch, config: ModelConfig | None = None) -> ModelOutputs:
    """Logits and unit-norm embeddings for every row of the batch."""
    return forward_cached(params, batch).outputs


def forward_cached(params: ModelParams, batch) -> ForwardCache:
    x = np.ascontiguousarray(batch, dtype=np.float64)
    if x.ndim != 2:
        raise ShapeError(f"batch must be a matrix, got shape {x.shape}")
    if x.shape[1] != params.encoder_weights[0].shape[0]:
        raise ShapeError(
            f"batch has {x.shape[1]} columns, model expects "
            f"{params.encoder_weights[0].shape[0]}"
        )
    hidden = []
    h = x
    for w, b in zip(params.encoder_weights, params.encoder_biases):
        h = K.tanh_fwd(K.affine(h, w, b))
        hidden.append(h)
    logits = K.affine(h, params.classifier_weight, params.classifier_bias)
    proj_hidden = K.tanh_fwd(K.affine(h, params.proj_weight1, params.proj_bias1))
    raw_embed = K.affine(proj_hidden, params.proj_weight2, params.proj_bias2)
    embed, norms = K.l2_normalize_rows(raw_embed)
    return ForwardCache(
        inputs=x,
        hidden=hidden,
        proj_hidden=proj_hidden,
        raw_embed=raw_embed,
        embed_norms=norms,
        outputs=ModelOutputs(logits=logits, embeddings=embed),
    )


def backward(params: ModelParams, cache: ForwardCache, dlogits, dembed) -> ModelParams:
    """Parameter gradients given upstream gradients on logits and embeddings.

    ``dembed`` is the gradient w.r.t. the normalized embeddings; the
    normalization Jacobian is applied here.
    """
    n = cache.inputs.shape[0]
    if dlogits is None:
        dlogits = np.zeros_like(cache.outputs.logits)
    if dembed is None:
        dembed = np.zeros_like(cache.outputs.embeddings)
    dlogits = np.ascontiguousarray(dlogits, dtype=np.float64)
    dembed = np.ascontiguousarray(dembed, dtype=np.float64)
    if dlogits.shape != cache.outputs.logits.shape or dembed.shape != cache.outputs.embeddings.shape:
        raise ShapeError("upstream gradient shapes do not match forward outputs")

    grads = params.zeros_like()
    h_last = cache.hidden[-1]

    # Projection head.
    draw = K.l2_normalize_bwd(cache.outputs.embeddings, cache.embed_norms, dembed)
    dproj_hidden, grads.proj_weight2, grads.proj_bias2 = K.affine_grads(
        cache.proj_hidden, params.proj_weight2, draw
    )
    dp1 = K.tanh_bwd(cache.proj_hidden, dproj_hidden)
    dh_proj, grads.proj_weight1, grads.proj_bias1 = K.affine_grads(
        h_last, params.proj_weight1, dp1
    )

    # Classifier head.
    dh_cls, grads.classifier_weight, grads.classifier_bias = K.affine_grads(
        h_last, params.classifier_weight, dlogits
    )

    # Encoder stack.
    dh = dh_cls + dh_proj
    for layer in range(len(params.encoder_weights) - 1, -1, -1):
        da = K.tanh_bwd(cache.hidden[layer], dh)
        below = cache.hidden[layer - 1] if layer > 0 else cache.inputs
        dh, grads.encoder_weights[layer], grads.encoder_biases[layer] = K.affine_grads(
            below, params.encoder_weights[layer], da
        )
    del n
    return grads


def predict_label(logits, num_id_classes: int, include_outlier: bool = False) -> np.ndarray:
    """Row-wise argmax class; ties resolve to the lowest index.

    By default the outlier position (if present) is excluded, so the result is
    always a valid in-distribution class.
    """
    logits = np.asarray(logits, dtype=np.float64)
    width = logits.shape[1] if include_outlier else num_id_classes
    if logits.shape[1] < width:
        raise ShapeError("logit width smaller than the requested class range")
    return np.argmax(logits[:, :width], axis=1)
