"""Ground states, spectra and number distributions of two laser-coupled condensates."""

from .core import (CatSpecError, DegenerateInteractionError, LambdaConvention, ModelParams,
                   NumberDistribution, ParameterError, Spectrum, lambda_from_Lambda)

__all__ = [
    "CatSpecError",
    "DegenerateInteractionError",
    "LambdaConvention",
    "ModelParams",
    "NumberDistribution",
    "ParameterError",
    "Spectrum",
    "lambda_from_Lambda",
]
__version__ = "0.1.0"
