"""
Bounded re-attempts of numerical procedures with a perturbed input.

A failed attempt is not repeated as is: every attempt carries a `perturbation`
that grows linearly with the attempt number, and the body uses it to move its
input (shrink a contour, shift a grid). Nothing sleeps.

Example:
    >>> from qgraph._retry import Retrying
    >>> for attempt in Retrying(max_attempts=5, perturbation_step=1e-3, logger_prefix="Resonances"):
    ...     with attempt:
    ...         count = count_on_contour(rect.shrink(attempt.perturbation))
    ...         break
"""

from __future__ import annotations

import logging
from collections.abc import Iterator
from dataclasses import dataclass

logger = logging.getLogger(__name__)


class RetryableError(Exception):
    """
    Failure that a perturbed input may avoid.

    `Retrying` re-attempts subclasses without listing them in `retry_on_exceptions`.
    """


class MaxRetriesExceededError(Exception):
    """
    Raised when every attempt failed.

    Attributes:
        last_exception: The error of the final attempt.
        errors: The errors of all attempts, oldest first.
    """

    def __init__(self, message: str, last_exception: Exception | None = None,
                 errors: tuple[Exception, ...] = ()):
        super().__init__(message)
        self.last_exception = last_exception
        self.errors = errors


@dataclass(frozen=True)
class RetryAttemptContext:
    """
    One attempt, used as a context manager.

    Attributes:
        attempt_number: One-based attempt index.
        perturbation: perturbation_step * (attempt_number - 1); zero on the first attempt.
    """

    _retrying: Retrying
    attempt_number: int

    def __post_init__(self) -> None:
        assert 1 <= self.attempt_number <= self._retrying.max_attempts, \
            f"🌀 Sanity check | attempt {self.attempt_number} outside 1..{self._retrying.max_attempts}"

    @property
    def perturbation(self) -> float:
        return self._retrying.perturbation_step * (self.attempt_number - 1)

    @property
    def is_first_attempt(self) -> bool:
        return self.attempt_number == 1

    @property
    def is_last_attempt(self) -> bool:
        return self.attempt_number == self._retrying.max_attempts

    @property
    def previous_errors(self) -> tuple[Exception, ...]:
        return tuple(self._retrying.errors)

    def __enter__(self) -> RetryAttemptContext:
        return self

    def __exit__(
        self,
        exc_type: type[BaseException] | None,
        exc_val: BaseException | None,
        exc_tb: object,
    ) -> bool:
        """Suppress a retryable error unless this was the last attempt; pass everything else through."""
        if not isinstance(exc_val, Exception) or not self._retrying.is_retryable(exc_val):
            return False
        self._retrying.record_failure(self, exc_val)
        return True


class Retrying:
    """
    Iterable of at most `max_attempts` attempts.

    Args:
        max_attempts: Total number of attempts, at least 1.
        perturbation_step: Growth of `attempt.perturbation` per failed attempt.
        retry_on_exceptions: Extra exception types to re-attempt besides RetryableError.
        logger_prefix: Context printed in log lines (e.g. "Resonances").

    Raises:
        MaxRetriesExceededError: From the last attempt when it fails with a retryable error.
    """

    def __init__(
        self,
        max_attempts: int = 5,
        perturbation_step: float = 0.0,
        retry_on_exceptions: tuple[type[Exception], ...] = (),
        logger_prefix: str = "",
    ):
        if max_attempts < 1:
            raise ValueError(f"max_attempts must be >= 1, got {max_attempts}")
        if perturbation_step < 0:
            raise ValueError(f"perturbation_step must be >= 0, got {perturbation_step}")
        self.max_attempts = max_attempts
        self.perturbation_step = perturbation_step
        self.retry_on_exceptions = retry_on_exceptions
        self.logger_prefix = logger_prefix
        self.errors: list[Exception] = []

    def __iter__(self) -> Iterator[RetryAttemptContext]:
        self.errors = []
        for number in range(1, self.max_attempts + 1):
            yield RetryAttemptContext(self, number)

    def is_retryable(self, exception: Exception) -> bool:
        return isinstance(exception, (RetryableError, *self.retry_on_exceptions))

    def record_failure(self, attempt: RetryAttemptContext, exception: Exception) -> None:
        """Log a failed attempt; raise MaxRetriesExceededError after the last one."""
        self.errors.append(exception)
        context = f"{self.logger_prefix[:26]:<26} | RETRY |"
        if not attempt.is_last_attempt:
            logger.warning(
                f"{context} ⚠️ Attempt {attempt.attempt_number}/{self.max_attempts} failed "
                f"(perturbation {attempt.perturbation:.3g}): {exception}"
            )
            return
        logger.error(f"{context} ❌ All {self.max_attempts} attempts failed. Last error: {exception}")
        raise MaxRetriesExceededError(
            f"{self.max_attempts} attempts failed. Last error: {exception}",
            last_exception=exception,
            errors=tuple(self.errors),
        ) from exception
