"""Convolutional text classifier over pretrained word vectors.

One convolution + global max pooling over the token sequence, a dense ReLU
layer with dropout, and a linear output head. Single-label training uses
cross-entropy on class indices; multi-label training uses a sigmoid output
with binary cross-entropy on multi-hot targets, thresholded at 0.5.

torch is an optional dependency; importing this module without it is fine,
using the cnn family is not.
"""

from __future__ import annotations

import numpy as np
from sklearn.metrics import f1_score

from .errors import UnavailableFamily
from .tokens import PAD_INDEX, UNK_INDEX, build_vocabulary, encode, tokenize

try:
    import torch
    from torch import nn
except ImportError:  # pragma: no cover - exercised only without the extra
    torch = None
    nn = None


def _require_torch() -> None:
    if torch is None:
        raise UnavailableFamily(
            "the cnn family needs the optional torch package "
            "(pip install 'innolens-harness[cnn]')"
        )


def sample_cnn_params(rng: np.random.Generator) -> dict:
    return {
        "num_words": int(rng.integers(10000, 30000, endpoint=True)),
        "seq_len": int(rng.integers(100, 300, endpoint=True)),
        "n_filters": int(rng.integers(64, 256, endpoint=True)),
        "kernel_size": int(rng.integers(3, 8, endpoint=True)),
        "dense_units": int(rng.integers(32, 256, endpoint=True)),
        "dropout": float(rng.uniform(0.1, 0.5)),
        "trainable": bool(rng.integers(0, 2)),
        "batch_size": int(rng.integers(32, 128, endpoint=True)),
        "max_epochs": int(rng.integers(5, 15, endpoint=True)),
    }


CNN_PARAM_NAMES = frozenset(sample_cnn_params(np.random.default_rng(0)))


if torch is not None:

    class TextCNN(nn.Module):
        def __init__(
            self,
            embedding_matrix: np.ndarray,
            n_filters: int,
            kernel_size: int,
            dense_units: int,
            dropout: float,
            n_out: int,
            trainable: bool,
        ) -> None:
            super().__init__()
            weights = torch.tensor(embedding_matrix, dtype=torch.float32)
            self.embedding = nn.Embedding.from_pretrained(
                weights, freeze=not trainable, padding_idx=PAD_INDEX
            )
            self.conv = nn.Conv1d(embedding_matrix.shape[1], n_filters, kernel_size)
            self.dense = nn.Linear(n_filters, dense_units)
            self.dropout = nn.Dropout(dropout)
            self.out = nn.Linear(dense_units, n_out)

        def forward(self, x):
            embedded = self.embedding(x).transpose(1, 2)  # (batch, dim, seq)
            pooled = torch.relu(self.conv(embedded)).max(dim=2).values
            hidden = self.dropout(torch.relu(self.dense(pooled)))
            return self.out(hidden)


def _embedding_matrix(
    vocab: dict[str, int],
    vectors_table: dict[str, np.ndarray],
    dim: int,
    seed: int,
) -> np.ndarray:
    """Pretrained vectors per vocabulary item; seeded normal rows for misses."""
    rng = np.random.default_rng(seed)
    matrix = np.zeros((len(vocab) + 2, dim), dtype=np.float64)
    for token, index in sorted(vocab.items(), key=lambda kv: kv[1]):
        vector = vectors_table.get(token)
        matrix[index] = vector if vector is not None else rng.normal(0.0, 0.1, dim)
    matrix[PAD_INDEX] = 0.0
    matrix[UNK_INDEX] = 0.0
    return matrix


def _encode_texts(
    texts: list[str], vocab: dict[str, int], seq_len: int, lowercase: bool
):
    rows = [encode(tokenize(t, lowercase=lowercase), vocab, seq_len) for t in texts]
    return torch.tensor(rows, dtype=torch.int64)


def _fit(
    train_texts: list[str],
    targets: np.ndarray,
    params: dict,
    seed: int,
    multilabel: bool,
    n_classes: int,
    vectors_table: dict[str, np.ndarray],
    dim: int,
    lowercase: bool,
):
    _require_torch()
    if params["seq_len"] < params["kernel_size"]:
        raise ValueError("seq_len must be at least kernel_size")
    torch.manual_seed(seed)
    vocab = build_vocabulary(train_texts, params["num_words"], lowercase=lowercase)
    matrix = _embedding_matrix(vocab, vectors_table, dim, seed)
    model = TextCNN(
        matrix,
        n_filters=params["n_filters"],
        kernel_size=params["kernel_size"],
        dense_units=params["dense_units"],
        dropout=params["dropout"],
        n_out=n_classes,
        trainable=params["trainable"],
    )
    x = _encode_texts(train_texts, vocab, params["seq_len"], lowercase)
    if multilabel:
        y = torch.tensor(targets, dtype=torch.float32)
        loss_fn = nn.BCEWithLogitsLoss()
    else:
        y = torch.tensor(targets, dtype=torch.int64)
        loss_fn = nn.CrossEntropyLoss()
    # the training grid carries no learning rate; Adam's default applies
    optimizer = torch.optim.Adam(model.parameters())
    shuffler = torch.Generator().manual_seed(seed)
    batch = params["batch_size"]
    model.train()
    for _ in range(params["max_epochs"]):
        order = torch.randperm(len(x), generator=shuffler)
        for start in range(0, len(x), batch):
            idx = order[start : start + batch]
            optimizer.zero_grad()
            loss = loss_fn(model(x[idx]), y[idx])
            loss.backward()
            optimizer.step()
    return model, vocab


def _predict(
    model,
    texts: list[str],
    vocab: dict[str, int],
    params: dict,
    multilabel: bool,
    lowercase: bool,
) -> np.ndarray:
    x = _encode_texts(texts, vocab, params["seq_len"], lowercase)
    model.eval()
    with torch.no_grad():
        logits = model(x)
        if multilabel:
            return (torch.sigmoid(logits) > 0.5).to(torch.int64).numpy()
        return logits.argmax(dim=1).numpy()


def fit_predict_texts(
    train_texts: list[str],
    targets: np.ndarray,
    eval_texts: list[str],
    params: dict,
    seed: int,
    multilabel: bool,
    n_classes: int,
    vectors_table: dict[str, np.ndarray],
    dim: int,
    lowercase: bool,
) -> np.ndarray:
    """Train on the full train split and predict the eval texts."""
    model, vocab = _fit(
        train_texts, targets, params, seed, multilabel, n_classes,
        vectors_table, dim, lowercase,
    )
    return _predict(model, eval_texts, vocab, params, multilabel, lowercase)


def cv_scores(
    texts: list[str],
    targets: np.ndarray,
    fold_indices,
    params: dict,
    seed: int,
    multilabel: bool,
    n_classes: int,
    vectors_table: dict[str, np.ndarray],
    dim: int,
    lowercase: bool,
) -> tuple[float, ...]:
    scores = []
    for train_idx, test_idx in fold_indices:
        predicted = fit_predict_texts(
            [texts[i] for i in train_idx],
            targets[train_idx],
            [texts[i] for i in test_idx],
            params,
            seed,
            multilabel,
            n_classes,
            vectors_table,
            dim,
            lowercase,
        )
        if multilabel:
            scores.append(
                float(f1_score(targets[test_idx], predicted, average="macro", zero_division=0))
            )
        else:
            scores.append(
                float(
                    f1_score(
                        targets[test_idx],
                        predicted,
                        average="macro",
                        labels=list(range(n_classes)),
                        zero_division=0,
                    )
                )
            )
    return tuple(scores)
