"""Linear-chain CRF decoding head.

The generic layer scores label sequences as emissions plus transitions
(with dedicated start/end transition vectors) and supports exact decoding
and log-likelihood via dynamic programming. The tagger wraps it with the
BMESO label inventory: structurally impossible transitions are pinned to
-1e4, which keeps losses finite while making ill-formed decodes unreachable
in practice.
"""

from __future__ import annotations

import torch
from torch import nn

from .errors import DataError, LabelError
from .labels import LabelSet, split_label, validate_bmeso
from .lattice import FlatLattice

BLOCKED_SCORE = -1.0e4


class LinearChainCrf(nn.Module):
    """Label-sequence scorer; masks, when given, pin transitions to -1e4."""

    def __init__(
        self,
        num_labels: int,
        allowed: torch.Tensor | None = None,
        allowed_start: torch.Tensor | None = None,
        allowed_end: torch.Tensor | None = None,
    ):
        super().__init__()
        self.num_labels = num_labels
        self.transitions = nn.Parameter(torch.zeros(num_labels, num_labels))
        self.start_transitions = nn.Parameter(torch.zeros(num_labels))
        self.end_transitions = nn.Parameter(torch.zeros(num_labels))
        self.register_buffer("allowed", allowed, persistent=False)
        self.register_buffer("allowed_start", allowed_start, persistent=False)
        self.register_buffer("allowed_end", allowed_end, persistent=False)

    def _masked(self, scores: torch.Tensor, mask: torch.Tensor | None) -> torch.Tensor:
        if mask is None:
            return scores
        return scores.masked_fill(~mask, BLOCKED_SCORE)

    def effective_transitions(self) -> torch.Tensor:
        return self._masked(self.transitions, self.allowed)

    def effective_start(self) -> torch.Tensor:
        return self._masked(self.start_transitions, self.allowed_start)

    def effective_end(self) -> torch.Tensor:
        return self._masked(self.end_transitions, self.allowed_end)

    def _check(self, emissions: torch.Tensor) -> None:
        if emissions.dim() != 2 or emissions.shape[1] != self.num_labels:
            raise DataError(
                f"emissions must be (L, {self.num_labels}), got {tuple(emissions.shape)}"
            )
        if emissions.shape[0] < 1:
            raise DataError("emissions must cover at least one position")

    def sequence_score(self, emissions: torch.Tensor, tags: list[int]) -> torch.Tensor:
        """Unnormalized score of one label sequence."""
        self._check(emissions)
        if len(tags) != emissions.shape[0]:
            raise DataError(f"{len(tags)} tags for {emissions.shape[0]} positions")
        trans = self.effective_transitions()
        score = self.effective_start()[tags[0]] + emissions[0, tags[0]]
        for i in range(1, len(tags)):
            score = score + trans[tags[i - 1], tags[i]] + emissions[i, tags[i]]
        return score + self.effective_end()[tags[-1]]

    def log_partition(self, emissions: torch.Tensor) -> torch.Tensor:
        """log sum over all label sequences, by the forward algorithm."""
        self._check(emissions)
        trans = self.effective_transitions()
        alpha = self.effective_start() + emissions[0]
        for i in range(1, emissions.shape[0]):
            alpha = torch.logsumexp(alpha.unsqueeze(1) + trans, dim=0) + emissions[i]
        return torch.logsumexp(alpha + self.effective_end(), dim=0)

    def nll(self, emissions: torch.Tensor, tags: list[int]) -> torch.Tensor:
        """Negative log-likelihood of the gold sequence."""
        return self.log_partition(emissions) - self.sequence_score(emissions, tags)

    @torch.no_grad()
    def decode(self, emissions: torch.Tensor) -> list[int]:
        """Maximum-score sequence (Viterbi); ties go to the lowest index."""
        self._check(emissions)
        trans = self.effective_transitions()
        score = self.effective_start() + emissions[0]
        history = []
        for i in range(1, emissions.shape[0]):
            best, back = torch.max(score.unsqueeze(1) + trans, dim=0)
            score = best + emissions[i]
            history.append(back)
        score = score + self.effective_end()
        best_last = int(torch.max(score, dim=0).indices)
        tags = [best_last]
        for back in reversed(history):
            tags.append(int(back[tags[-1]]))
        tags.reverse()
        return tags


def bmeso_masks(label_set: LabelSet) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    """Transition/start/end masks encoding BMESO well-formedness."""
    n = len(label_set)
    allowed = torch.zeros(n, n, dtype=torch.bool)
    start = torch.zeros(n, dtype=torch.bool)
    end = torch.zeros(n, dtype=torch.bool)
    parsed = [split_label(lab) for lab in label_set.labels]
    for i, (pa, ca) in enumerate(parsed):
        start[i] = pa in ("O", "B", "S")
        end[i] = pa in ("O", "E", "S")
        for j, (pb, cb) in enumerate(parsed):
            if pa in ("O", "E", "S"):
                allowed[i, j] = pb in ("O", "B", "S")
            else:  # B or M: span must continue in the same category
                allowed[i, j] = pb in ("M", "E") and cb == ca
    return allowed, start, end


class CrfTagger(nn.Module):
    """Emission projection plus BMESO-constrained CRF over characters.

    Only the character-token rows of the encoded lattice feed the CRF; span
    tokens shape the representations through attention but are dropped at
    the output.
    """

    def __init__(self, d_model: int, label_set: LabelSet):
        super().__init__()
        self.label_set = label_set
        self.projection = nn.Linear(d_model, len(label_set))
        allowed, start, end = bmeso_masks(label_set)
        self.crf = LinearChainCrf(len(label_set), allowed, start, end)

    def emissions(self, encoded: torch.Tensor, lattice: FlatLattice) -> torch.Tensor:
        """(L, num_labels) emission scores for the L character positions."""
        if encoded.shape[0] != len(lattice):
            raise DataError(
                f"encoded rows {encoded.shape[0]} do not align with lattice of {len(lattice)}"
            )
        return self.projection(encoded[: lattice.char_count])

    def nll(self, emissions: torch.Tensor, gold: list[str]) -> torch.Tensor:
        """CRF negative log-likelihood of a gold BMESO labeling."""
        validate_bmeso(gold)
        return self.crf.nll(emissions, self.label_set.encode(gold))

    def decode(self, emissions: torch.Tensor) -> list[str]:
        labels = self.label_set.decode(self.crf.decode(emissions))
        if not labels:
            raise LabelError("decoded an empty label sequence")
        return labels
