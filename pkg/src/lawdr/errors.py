"""Exception types shared across the package.

Every error raised by library code derives from LawdrError so callers
(and the CLI) can catch one base class and map it to a nonzero exit.
"""


class LawdrError(Exception):
    """Base class for all package errors."""


# --- container / file-format errors ---------------------------------------


class CorpusStoreError(LawdrError):
    """Base class for embedding-container and manifest problems."""


class BadMagic(CorpusStoreError):
    """File does not start with the expected magic bytes."""


class VersionMismatch(CorpusStoreError):
    """Container version is not one this reader understands."""


class TruncatedFile(CorpusStoreError):
    """Payload length does not match the row/dim counts in the header."""


class NonFiniteValue(CorpusStoreError):
    """A NaN or infinity was found in the payload."""


class IoFailure(CorpusStoreError):
    """Underlying OS-level read or write failed."""


class ManifestFormatError(CorpusStoreError):
    """A manifest line is not valid JSON or is missing required fields."""


class RangeGap(CorpusStoreError):
    """Manifest sentence ranges leave rows uncovered."""


class RangeOverlap(CorpusStoreError):
    """Manifest sentence ranges claim the same row twice."""


class RowCountMismatch(CorpusStoreError):
    """Manifest covers a different number of rows than the matrix holds."""


class DuplicateDocId(CorpusStoreError):
    """The same document id appears more than once."""


class GoldAlignmentError(CorpusStoreError):
    """A gold-pairs file repeats a source or target document id."""


# --- numeric-core errors ---------------------------------------------------


class NumericError(LawdrError):
    """Base class for linear-algebra kernel failures."""


class KTooLarge(NumericError):
    """Requested more components / neighbours than the data supports."""


class DTooLarge(NumericError):
    """Requested output dimensionality exceeds the input dimensionality."""


class DimMismatch(NumericError):
    """Operands have incompatible dimensionality."""


class ConvergenceFailure(NumericError):
    """Iterative solver hit its iteration cap before converging."""


class NotOrthonormal(NumericError):
    """A basis failed its orthonormality check."""


# --- debiasing / classifier errors -----------------------------------------


class DebiasError(LawdrError):
    """Base class for dominant-direction removal failures."""


class TooFewSamples(DebiasError):
    """Not enough rows per class to train and evaluate a classifier."""


class NoRankSatisfies(DebiasError):
    """No candidate rank pushed classifier accuracy below the threshold."""

    def __init__(self, message: str, best_accuracy: float):
        super().__init__(message)
        self.best_accuracy = best_accuracy


# --- density / weighting errors --------------------------------------------


class DensityError(LawdrError):
    """Base class for density-estimation failures."""


class BadBandwidth(DensityError):
    """Bandwidth is not a finite positive number."""


class EmptyGrid(DensityError):
    """Bandwidth search received an empty candidate grid."""


class TooFewPoints(DensityError):
    """Fewer points than cross-validation folds."""


class AllZeroDensity(DensityError):
    """Every density estimate is zero; weights would be degenerate."""


# --- pooling / alignment errors --------------------------------------------


class PoolingError(LawdrError):
    """Base class for document-pooling failures."""


class WeightRowMismatch(PoolingError):
    """Weight vector length does not match the sentence count."""


class AlignmentError(LawdrError):
    """Base class for document-alignment failures."""


class EmptyCorpus(AlignmentError):
    """A document pool on one side of the alignment is empty."""


class EmptyGold(AlignmentError):
    """Recall was requested against an empty gold set."""


class ZeroDenominator(AlignmentError):
    """Margin denominator is exactly zero for a candidate pair."""


# --- configuration errors ---------------------------------------------------


class ConfigError(LawdrError):
    """A config file or flag value could not be parsed."""
