"""Fine-tuning and inference for a pretrained ELECTRA-style sequence classifier.

torch and transformers are imported lazily so the rest of the package
works without them.
"""

from __future__ import annotations

import copy
import logging
from dataclasses import asdict, dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .._validation import check_binary_target, check_both_classes, check_texts
from ..exceptions import CheckpointNotFoundError, ContractError, ModelLoadError

logger = logging.getLogger(__name__)

DEFAULT_CHECKPOINT = "gooojy/suicidal-electra"


@dataclass(frozen=True)
class TransformerConfig:
    vocabulary_size: int = 30522
    embedding_size: int = 768
    hidden_size: int = 768
    num_hidden_layers: int = 12
    num_attention_heads: int = 12
    intermediate_size: int = 3072
    max_position_embeddings: int = 512
    hidden_activation: str = "gelu"
    hidden_dropout: float = 0.1
    attention_dropout: float = 0.1
    summary_activation: str = "gelu"
    summary_last_dropout: float = 0.1

    def __post_init__(self):
        if self.hidden_size % self.num_attention_heads:
            raise ContractError("hidden_size must be divisible by num_attention_heads")

    # our field name -> attribute on the checkpoint's config object
    HF_NAMES = {
        "vocabulary_size": "vocab_size",
        "embedding_size": "embedding_size",
        "hidden_size": "hidden_size",
        "num_hidden_layers": "num_hidden_layers",
        "num_attention_heads": "num_attention_heads",
        "intermediate_size": "intermediate_size",
        "max_position_embeddings": "max_position_embeddings",
        "hidden_activation": "hidden_act",
        "hidden_dropout": "hidden_dropout_prob",
        "attention_dropout": "attention_probs_dropout_prob",
        "summary_activation": "summary_activation",
        "summary_last_dropout": "summary_last_dropout",
    }

    @classmethod
    def from_hf(cls, hf_config) -> "TransformerConfig":
        kw = {}
        for ours, theirs in cls.HF_NAMES.items():
            if hasattr(hf_config, theirs):
                kw[ours] = getattr(hf_config, theirs)
        return cls(**kw)

    def mismatches(self, hf_config) -> list[str]:
        """Names of fields whose value differs from ``hf_config``."""
        bad = []
        for ours, theirs in self.HF_NAMES.items():
            if hasattr(hf_config, theirs) and getattr(hf_config, theirs) != getattr(self, ours):
                bad.append(ours)
        return bad

    def to_hf(self, num_labels: int = 2):
        from transformers import ElectraConfig

        kw = {theirs: getattr(self, ours) for ours, theirs in self.HF_NAMES.items()}
        return ElectraConfig(num_labels=num_labels, **kw)


@dataclass(frozen=True)
class FinetuneConfig:
    learning_rate: float = 2e-5
    batch_size: int = 32
    epochs: int = 3
    weight_decay: float = 0.01
    warmup_fraction: float = 0.1
    max_sequence_tokens: int = 512
    seed: int = 42
    patience: int = 1
    eval_batch_size: int = 64


class ElectraTextClassifier(ClassifierMixin, BaseEstimator):
    """Sequence classifier fine-tuned from a pretrained checkpoint.

    ``fit`` accepts optional validation data; when given, the weights with
    the best validation F1 are kept and training stops after ``patience``
    epochs without improvement.
    """

    def __init__(self, checkpoint=DEFAULT_CHECKPOINT, learning_rate=2e-5, batch_size=32, epochs=3,
                 weight_decay=0.01, warmup_fraction=0.1, max_sequence_tokens=512, seed=42,
                 patience=1, eval_batch_size=64, architecture=None, local_files_only=False,
                 device=None):
        self.checkpoint = checkpoint
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.epochs = epochs
        self.weight_decay = weight_decay
        self.warmup_fraction = warmup_fraction
        self.max_sequence_tokens = max_sequence_tokens
        self.seed = seed
        self.patience = patience
        self.eval_batch_size = eval_batch_size
        self.architecture = architecture
        self.local_files_only = local_files_only
        self.device = device

    @classmethod
    def from_configs(cls, fconfig: FinetuneConfig, tconfig: TransformerConfig | None = None,
                     checkpoint: str = DEFAULT_CHECKPOINT, **kw) -> "ElectraTextClassifier":
        return cls(checkpoint=checkpoint, architecture=tconfig, **asdict(fconfig), **kw)

    def finetune_config(self) -> FinetuneConfig:
        return FinetuneConfig(self.learning_rate, self.batch_size, self.epochs, self.weight_decay,
                              self.warmup_fraction, self.max_sequence_tokens, self.seed,
                              self.patience, self.eval_batch_size)

    def _device(self):
        import torch

        if self.device:
            return torch.device(self.device)
        return torch.device("cuda" if torch.cuda.is_available() else "cpu")

    def load_checkpoint(self):
        """Load tokenizer and weights from ``checkpoint`` (path or hub id)."""
        from transformers import AutoModelForSequenceClassification, AutoTokenizer

        try:
            tokenizer = AutoTokenizer.from_pretrained(self.checkpoint, local_files_only=self.local_files_only)
            model = AutoModelForSequenceClassification.from_pretrained(
                self.checkpoint, num_labels=2, local_files_only=self.local_files_only
            )
        except (OSError, ValueError) as exc:
            raise CheckpointNotFoundError(
                f"cannot load checkpoint {self.checkpoint!r}: {exc}\n"
                "Download it once with `huggingface-cli download gooojy/suicidal-electra "
                "--local-dir <dir>` and pass that directory as the checkpoint."
            ) from exc
        if self.architecture is not None:
            bad = self.architecture.mismatches(model.config)
            if bad:
                raise ModelLoadError(
                    f"checkpoint architecture differs in {', '.join(bad)}", field=bad[0]
                )
        self.tokenizer_ = tokenizer
        self.model_ = model
        self.model_.to(self._device())
        self.classes_ = np.array([0, 1])
        return self

    def _encode(self, texts):
        return self.tokenizer_(
            list(texts),
            truncation=True,
            max_length=self.max_sequence_tokens,
            padding=True,
            return_tensors="pt",
        )

    def count_truncated(self, texts) -> int:
        lengths = self.tokenizer_(list(texts), truncation=False)["input_ids"]
        return sum(len(ids) > self.max_sequence_tokens for ids in lengths)

    def fit(self, X, y, X_val=None, y_val=None):
        import torch
        from transformers import get_linear_schedule_with_warmup

        texts = check_texts(X, allow_empty_list=False)
        y = check_binary_target(y, len(texts))
        check_both_classes(y)
        if self.max_sequence_tokens > (self.architecture or TransformerConfig()).max_position_embeddings:
            raise ContractError("max_sequence_tokens exceeds max_position_embeddings")
        self.load_checkpoint()
        self.history_ = []
        self.n_truncated_ = self.count_truncated(texts)
        if self.n_truncated_:
            logger.info("%d training texts truncated to %d tokens", self.n_truncated_, self.max_sequence_tokens)
        if self.epochs <= 0:
            return self

        torch.manual_seed(self.seed)
        device = self._device()
        model = self.model_
        no_decay = ("bias", "LayerNorm.weight", "layer_norm.weight")
        groups = [
            {"params": [p for n, p in model.named_parameters() if not any(k in n for k in no_decay)],
             "weight_decay": self.weight_decay},
            {"params": [p for n, p in model.named_parameters() if any(k in n for k in no_decay)],
             "weight_decay": 0.0},
        ]
        optimizer = torch.optim.AdamW(groups, lr=self.learning_rate)
        steps_per_epoch = -(-len(texts) // self.batch_size)
        total = steps_per_epoch * self.epochs
        scheduler = get_linear_schedule_with_warmup(optimizer, int(self.warmup_fraction * total), total)
        gen = torch.Generator().manual_seed(self.seed)
        labels = torch.tensor(y, dtype=torch.long)

        validate = X_val is not None and y_val is not None and len(X_val) > 0
        if validate:
            X_val = check_texts(X_val)
            y_val = check_binary_target(y_val, len(X_val))
        best_f1, best_state, stale = -1.0, None, 0

        for epoch in range(self.epochs):
            model.train()
            order = torch.randperm(len(texts), generator=gen).tolist()
            running = 0.0
            for start in range(0, len(order), self.batch_size):
                idx = order[start : start + self.batch_size]
                batch = self._encode([texts[i] for i in idx]).to(device)
                out = model(**batch, labels=labels[idx].to(device))
                out.loss.backward()
                torch.nn.utils.clip_grad_norm_(model.parameters(), 1.0)
                optimizer.step()
                scheduler.step()
                optimizer.zero_grad()
                running += out.loss.item() * len(idx)
            record = {"epoch": epoch + 1, "train_loss": running / len(texts)}
            if validate:
                from ..evaluate import compute_metrics, confusion

                preds = self.predict(X_val)
                f1 = compute_metrics(confusion(y_val, preds)).f1
                record["validation_f1"] = f1
                if f1 > best_f1:
                    best_f1, stale = f1, 0
                    best_state = copy.deepcopy({k: v.detach().cpu() for k, v in model.state_dict().items()})
                else:
                    stale += 1
            self.history_.append(record)
            logger.info("epoch %s", record)
            if validate and stale >= self.patience:
                break
        if best_state is not None:
            model.load_state_dict(best_state)
        return self

    def predict_proba(self, X):
        import torch

        check_is_fitted(self, "model_")
        texts = check_texts(X)
        self.model_.eval()
        out = []
        with torch.no_grad():
            for start in range(0, len(texts), self.eval_batch_size):
                batch = self._encode(texts[start : start + self.eval_batch_size]).to(self._device())
                logits = self.model_(**batch).logits.double()
                out.append(torch.softmax(logits, dim=-1).cpu().numpy())
        if not out:
            return np.zeros((0, 2))
        proba = np.concatenate(out)
        proba[:, 0] = 1.0 - proba[:, 1]
        return proba

    def predict(self, X):
        proba = self.predict_proba(X)
        return (proba[:, 1] > proba[:, 0]).astype(np.int64)

    def __sklearn_tags__(self):
        tags = super().__sklearn_tags__()
        tags.input_tags.string = True
        tags.non_deterministic = True
        return tags


def finetune_transformer(train, validation, tconfig: TransformerConfig | None = None,
                         fconfig: FinetuneConfig | None = None, checkpoint: str = DEFAULT_CHECKPOINT,
                         **kw) -> ElectraTextClassifier:
    """Fine-tune ``checkpoint`` on processed records; returns the fitted classifier."""
    fconfig = fconfig or FinetuneConfig()
    clf = ElectraTextClassifier.from_configs(fconfig, tconfig, checkpoint, **kw)
    return clf.fit(
        [r.cleaned for r in train], [r.label for r in train],
        [r.cleaned for r in validation], [r.label for r in validation],
    )
