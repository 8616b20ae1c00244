"""DNA k-mers and Jaccard similarity, classically and through QCAM."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .circuits import BitString, Sequence
from .heqc import HeqcEstimate
from .qcam import QcamResult, search_matches

log = logging.getLogger(__name__)

NUCLEOTIDE_CODE = {"A": 0b00, "T": 0b01, "G": 0b10, "C": 0b11}
CODE_NUCLEOTIDE = {v: k for k, v in NUCLEOTIDE_CODE.items()}
ALPHABET = "ATGC"


@dataclass(frozen=True)
class DnaStrand:
    bases: str

    def __post_init__(self):
        bases = self.bases.upper()
        if not bases:
            raise ValueError("empty DNA strand")
        bad = set(bases) - set(ALPHABET)
        if bad:
            raise ValueError(f"invalid nucleotides {sorted(bad)}")
        object.__setattr__(self, "bases", bases)

    def __len__(self):
        return len(self.bases)

    def __str__(self):
        return self.bases


@dataclass(frozen=True)
class KmerSet:
    kmers: frozenset[str]
    k: int

    def __post_init__(self):
        object.__setattr__(self, "kmers", frozenset(self.kmers))
        if any(len(s) != self.k for s in self.kmers):
            raise ValueError(f"all k-mers must have length {self.k}")

    def __len__(self):
        return len(self.kmers)

    def __iter__(self):
        return iter(sorted(self.kmers))

    def __contains__(self, kmer):
        return kmer in self.kmers

    def __and__(self, other: "KmerSet") -> "KmerSet":
        _same_k(self, other)
        return KmerSet(self.kmers & other.kmers, self.k)

    def __or__(self, other: "KmerSet") -> "KmerSet":
        _same_k(self, other)
        return KmerSet(self.kmers | other.kmers, self.k)


def _same_k(a: KmerSet, b: KmerSet) -> None:
    if a.k != b.k:
        raise ValueError(f"k-mer lengths differ ({a.k} vs {b.k})")


def _strand(s) -> DnaStrand:
    return s if isinstance(s, DnaStrand) else DnaStrand(str(s))


def encode_kmer(kmer: str) -> BitString:
    """2 bits per nucleotide, leftmost nucleotide in the high bits."""
    value = 0
    for base in kmer.upper():
        try:
            value = (value << 2) | NUCLEOTIDE_CODE[base]
        except KeyError:
            raise ValueError(f"invalid nucleotide {base!r} in {kmer!r}") from None
    return BitString(value, 2 * len(kmer))


def decode_kmer(code: BitString | int, k: int | None = None) -> str:
    if isinstance(code, BitString):
        value, k = code.value, code.depth // 2
    else:
        value = int(code)
    return "".join(CODE_NUCLEOTIDE[(value >> (2 * (k - 1 - p))) & 0b11] for p in range(k))


def kmer_strings(strand, k: int) -> list[str]:
    bases = _strand(strand).bases
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(bases) < k:
        raise ValueError(f"strand of length {len(bases)} is shorter than k={k}")
    return [bases[i:i + k] for i in range(len(bases) - k + 1)]


def kmerize(strand, k: int) -> Sequence:
    """All length-k windows in order, duplicates kept, encoded at depth 2k."""
    return Sequence(tuple(encode_kmer(s).value for s in kmer_strings(strand, k)), 2 * k)


def unique_kmers(strand, k: int) -> KmerSet:
    return KmerSet(frozenset(kmer_strings(strand, k)), k)


def generate_dna(length: int, seed) -> DnaStrand:
    if length < 1:
        raise ValueError("length must be >= 1")
    rng = np.random.default_rng(seed)
    return DnaStrand("".join(np.array(list(ALPHABET))[rng.integers(0, 4, length)]))


def mutate(strand, rate: float, seed) -> DnaStrand:
    """Substitute each base with probability ``rate`` by a different base."""
    if not 0.0 <= rate <= 1.0:
        raise ValueError("rate must lie in [0, 1]")
    bases = _strand(strand).bases
    rng = np.random.default_rng(seed)
    hit = rng.random(len(bases)) < rate
    # offset 1..3 in code space always lands on a different base
    shift = rng.integers(1, 4, len(bases))
    codes = np.array([NUCLEOTIDE_CODE[c] for c in bases])
    codes = np.where(hit, (codes + shift) % 4, codes)
    return DnaStrand("".join(CODE_NUCLEOTIDE[int(c)] for c in codes))


def jaccard_classical(a: KmerSet, b: KmerSet) -> float:
    _same_k(a, b)
    union = len(a.kmers | b.kmers)
    if union == 0:
        raise ValueError("Jaccard index undefined for two empty sets")
    return len(a.kmers & b.kmers) / union


def common_string(a, b) -> str:
    """Bases shared position-by-position, '*' where the strands differ."""
    a, b = _strand(a).bases, _strand(b).bases
    return "".join(x if x == y else "*" for x, y in zip(a, b))


def read_fasta(source) -> list[DnaStrand]:
    """Strands from FASTA-like text; '>' lines start a new record and are ignored.

    ``source`` may be a path or the text itself. Without any header line every
    non-empty line is its own strand.
    """
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source
                                    and Path(source).exists()):
        text = Path(source).read_text()
    else:
        text = str(source)
    lines = [ln.strip() for ln in text.splitlines()]
    if not any(ln.startswith(">") for ln in lines):
        return [DnaStrand(ln) for ln in lines if ln and not ln.startswith(";")]
    records, current = [], None
    for ln in lines:
        if ln.startswith(">"):
            if current:
                records.append(current)
            current = []
        elif ln and not ln.startswith(";") and current is not None:
            current.append(ln)
    if current:
        records.append(current)
    return [DnaStrand("".join(r)) for r in records]


@dataclass
class JaccardConfig:
    shots: int | None = None        # None: coupon-collector budget from the HEQC estimate
    heqc_shots: int = 2000
    variant: str = "hadamard"
    seed: int = 0
    max_qubits: int | None = None
    keep_depth: bool = True


@dataclass
class JaccardReport:
    size_a: int
    size_b: int
    size_intersection: int
    jaccard: float
    matched_kmers: KmerSet
    heqc: HeqcEstimate | None
    qcam: QcamResult | None
    sample_a: str = ""
    sample_b: str = ""
    no_solutions: bool = False
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "sample_a": self.sample_a,
            "sample_b": self.sample_b,
            "common": common_string(self.sample_a, self.sample_b) if self.sample_a else "",
            "k": self.matched_kmers.k,
            "kmers_in_intersection": list(self.matched_kmers),
            "size_a": self.size_a,
            "size_b": self.size_b,
            "size_intersection": self.size_intersection,
            "jaccard": self.jaccard,
            "no_solutions": self.no_solutions,
        }
        if self.heqc is not None:
            out["heqc"] = self.heqc.to_dict()
        if self.qcam is not None:
            out["qcam"] = {"k": self.qcam.k, "shots": self.qcam.shots, "seed": self.qcam.seed,
                           "rejected": self.qcam.rejected,
                           "matched_pairs": len(self.qcam.records)}
        out.update(self.meta)
        return out

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def jaccard_report_classical(strand_a, strand_b, k: int) -> JaccardReport:
    sa, sb = unique_kmers(strand_a, k), unique_kmers(strand_b, k)
    inter = sa & sb
    return JaccardReport(len(sa), len(sb), len(inter), jaccard_classical(sa, sb), inter,
                         None, None, str(strand_a), str(strand_b))


def jaccard_qcam(strand_a, strand_b, k: int, config: JaccardConfig | None = None) -> JaccardReport:
    """Jaccard index with A and B sizes computed classically and A n B sampled by QCAM."""
    config = config or JaccardConfig()
    strand_a, strand_b = _strand(strand_a), _strand(strand_b)
    seq_a, seq_b = kmerize(strand_a, k), kmerize(strand_b, k)
    size_a, size_b = len(set(seq_a.values)), len(set(seq_b.values))

    result, est, pa, pb = search_matches(
        seq_a, seq_b, seed=config.seed, shots=config.shots, heqc_shots=config.heqc_shots,
        variant=config.variant, keep_depth=config.keep_depth, max_qubits=config.max_qubits)

    values = {r.data_a.value for r in result.records}
    # pads never verify as matches; guard anyway since a pad value may need depth 2k+1
    matched = KmerSet(frozenset(decode_kmer(v, k) for v in values if v < (1 << 2 * k)), k)
    inter = len(matched)
    jac = inter / (size_a + size_b - inter)
    meta = {"qubits": pa.address_width + pb.address_width + 2 * pa.depth + 1,
            "padded_lengths": [len(pa), len(pb)], "padded_depth": pa.depth}
    log.info("jaccard k=%d: |A|=%d |B|=%d |AnB|=%d J=%.4f (grover k=%d, shots=%d)",
             k, size_a, size_b, inter, jac, result.k, result.shots)
    return JaccardReport(size_a, size_b, inter, jac, matched, est, result,
                         strand_a.bases, strand_b.bases, est.no_solutions, meta)
