"""Core domain entities for speech-face association.

Everything here is a plain value object: speech segments and face tracks carry
identity embeddings, candidate sets tie segments to temporally overlapping
tracks, and an assignment state records which track (if any) is currently the
active speaker face for each segment. All types are immutable after
construction except AssignmentState, which a single optimizer worker owns.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def as_embedding(values, *, what: str = "embedding") -> np.ndarray:
    """Validate and convert an identity embedding to a float64 vector.

    Embeddings must be flat, at least 2-dimensional, finite, and not all-zero
    (cosine similarity is undefined for a zero vector). Vectors are stored as
    given; normalization happens inside cosine computations.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{what} must be a flat vector, got shape {arr.shape}")
    if arr.size < 2:
        raise ValueError(f"{what} must have dimension >= 2, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} contains non-finite values")
    if float(np.linalg.norm(arr)) == 0.0:
        raise ValueError(f"{what} has zero norm")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SpeechSegment:
    """A speaker-homogeneous speech interval with a speaker-identity embedding."""

    id: str
    video_id: str
    start_s: float
    end_s: float
    embedding: np.ndarray

    def __post_init__(self):
        if not self.id:
            raise ValueError("segment id must be non-empty")
        if not (0.0 <= self.start_s < self.end_s):
            raise ValueError(
                f"segment {self.id}: need 0 <= start_s < end_s, "
                f"got ({self.start_s}, {self.end_s})"
            )
        object.__setattr__(
            self, "embedding", as_embedding(self.embedding, what=f"segment {self.id} embedding")
        )

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s


@dataclass(frozen=True)
class FaceBox:
    """A single detected face box at one timestamp."""

    box_id: str
    timestamp_s: float
    x1: float
    y1: float
    x2: float
    y2: float

    def __post_init__(self):
        if not self.box_id:
            raise ValueError("box id must be non-empty")
        if self.timestamp_s < 0:
            raise ValueError(f"box {self.box_id}: timestamp_s must be >= 0")
        if not (self.x1 < self.x2 and self.y1 < self.y2):
            raise ValueError(f"box {self.box_id}: need x1 < x2 and y1 < y2")


@dataclass(frozen=True, eq=False)
class FaceTrack:
    """A contiguous per-person face sequence with a face-identity embedding."""

    id: str
    video_id: str
    boxes: tuple[FaceBox, ...]
    embedding: np.ndarray

    def __post_init__(self):
        if not self.id:
            raise ValueError("track id must be non-empty")
        object.__setattr__(self, "boxes", tuple(self.boxes))
        if not self.boxes:
            raise ValueError(f"track {self.id}: boxes must be non-empty")
        times = [b.timestamp_s for b in self.boxes]
        if any(t1 >= t2 for t1, t2 in zip(times, times[1:])):
            raise ValueError(f"track {self.id}: box timestamps must be strictly increasing")
        object.__setattr__(
            self, "embedding", as_embedding(self.embedding, what=f"track {self.id} embedding")
        )

    @property
    def span(self) -> tuple[float, float]:
        """Temporal extent (first box timestamp, last box timestamp)."""
        return (self.boxes[0].timestamp_s, self.boxes[-1].timestamp_s)


@dataclass(frozen=True)
class ActivityScores:
    """External per-box active speaker scores, aligned 1:1 with track boxes."""

    per_track: dict[str, tuple[float, ...]]

    def __post_init__(self):
        clean: dict[str, tuple[float, ...]] = {}
        for track_id, values in self.per_track.items():
            values = tuple(float(v) for v in values)
            if not values:
                raise ValueError(f"track {track_id}: empty score list")
            for v in values:
                if not (0.0 <= v <= 1.0):
                    raise ValueError(f"track {track_id}: score {v} outside [0, 1]")
            clean[track_id] = values
        object.__setattr__(self, "per_track", clean)

    def __contains__(self, track_id: str) -> bool:
        return track_id in self.per_track


@dataclass
class AssignmentState:
    """Current active-speaker choice per segment, plus pinned (guided) segments.

    ``assignment[segment_id]`` is a track id, or None for segments removed from
    optimization (no overlapping candidates left). Pinned segments came from
    positive guidance and must never change during optimization.
    """

    assignment: dict[str, str | None] = field(default_factory=dict)
    pinned: set[str] = field(default_factory=set)

    def validate_against(self, candidates: dict[str, frozenset[str]]) -> None:
        for seg_id, track_id in self.assignment.items():
            if track_id is None:
                continue
            allowed = candidates.get(seg_id)
            if allowed is None or track_id not in allowed:
                raise ValueError(
                    f"segment {seg_id}: assigned track {track_id} not in candidate set"
                )

    def copy(self) -> "AssignmentState":
        return AssignmentState(dict(self.assignment), set(self.pinned))


@dataclass(frozen=True)
class GroundTruth:
    """Box-level speaking labels plus per-segment true speaker tracks.

    ``segment_truth`` maps segment id to the true track id, or None when the
    speaker is off-screen (faces visible, none of them speaking).
    """

    box_labels: dict[str, int]
    segment_truth: dict[str, str | None]

    def __post_init__(self):
        for box_id, label in self.box_labels.items():
            if label not in (0, 1):
                raise ValueError(f"box {box_id}: label must be 0 or 1, got {label}")


@dataclass(frozen=True)
class Config:
    """All tunables for association, guidance, fusion, and optimization.

    ``context_length`` is the number of segments optimized jointly per
    partition. Guidance thresholds compare strictly (score > tau_p pins,
    score < tau_n removes), so tau_p=1.0 and tau_n=0.0 disable guidance
    entirely and the guided mode degenerates to the unguided one.
    """

    context_length: int = 500
    tau_p: float = 0.9
    tau_n: float = 0.2
    alpha: float = 0.5
    max_segment_s: float = 1.0
    min_overlap_s: float = 0.0
    convergence_eps: float = 1e-9
    max_sweeps: int = 50
    rng_seed: int = 0

    def __post_init__(self):
        if self.context_length < 2:
            raise ValueError(f"context_length must be >= 2, got {self.context_length}")
        if not (0.0 < self.tau_p <= 1.0):
            raise ValueError(f"tau_p must be in (0, 1], got {self.tau_p}")
        if not (0.0 <= self.tau_n < 1.0):
            raise ValueError(f"tau_n must be in [0, 1), got {self.tau_n}")
        if self.tau_n >= self.tau_p:
            raise ValueError(f"tau_n ({self.tau_n}) must be < tau_p ({self.tau_p})")
        if not (0.0 <= self.alpha <= 1.0):
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.max_segment_s <= 0:
            raise ValueError(f"max_segment_s must be > 0, got {self.max_segment_s}")
        if self.min_overlap_s < 0:
            raise ValueError(f"min_overlap_s must be >= 0, got {self.min_overlap_s}")
        if self.convergence_eps <= 0:
            raise ValueError(f"convergence_eps must be > 0, got {self.convergence_eps}")
        if self.max_sweeps < 1:
            raise ValueError(f"max_sweeps must be >= 1, got {self.max_sweeps}")


def validate_dataset(
    segments: list[SpeechSegment],
    tracks: list[FaceTrack],
    scores: ActivityScores | None = None,
    *,
    max_segment_s: float = 1.0,
) -> list[str]:
    """Check cross-record consistency; returns a list of violations (empty = valid).

    Per-record invariants are enforced at construction time; this checks the
    things only visible across the whole dataset: id uniqueness, uniform
    embedding dimension per modality, segment duration caps, and activity
    score alignment.
    """
    violations: list[str] = []

    seen_seg: set[str] = set()
    for seg in segments:
        if seg.id in seen_seg:
            violations.append(f"duplicate segment id: {seg.id}")
        seen_seg.add(seg.id)
        if seg.duration_s > max_segment_s + 1e-9:
            violations.append(
                f"segment {seg.id}: duration {seg.duration_s:.6f}s exceeds cap {max_segment_s}s"
            )

    seen_track: set[str] = set()
    seen_box: set[str] = set()
    for track in tracks:
        if track.id in seen_track:
            violations.append(f"duplicate track id: {track.id}")
        seen_track.add(track.id)
        for box in track.boxes:
            if box.box_id in seen_box:
                violations.append(f"duplicate box id: {box.box_id}")
            seen_box.add(box.box_id)

    seg_dims = {seg.embedding.size for seg in segments}
    if len(seg_dims) > 1:
        violations.append(f"speech embedding dimensions not uniform: {sorted(seg_dims)}")
    track_dims = {track.embedding.size for track in tracks}
    if len(track_dims) > 1:
        violations.append(f"face embedding dimensions not uniform: {sorted(track_dims)}")

    if scores is not None:
        by_id = {track.id: track for track in tracks}
        for track_id, values in scores.per_track.items():
            track = by_id.get(track_id)
            if track is None:
                violations.append(f"activity scores reference unknown track: {track_id}")
            elif len(values) != len(track.boxes):
                violations.append(
                    f"track {track_id}: {len(values)} scores for {len(track.boxes)} boxes"
                )

    return violations
