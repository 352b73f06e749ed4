"""Tests for retry utilities."""

import unittest

from qgraph._errors import ContourError, NotInSpectrumError
from qgraph._retry import MaxRetriesExceededError, RetryableError, RetryAttemptContext, Retrying


class TestRetryAttemptContext(unittest.TestCase):
    """Tests for RetryAttemptContext."""

    def test_first_and_last_attempt(self):
        retrying = Retrying(max_attempts=3)
        self.assertTrue(RetryAttemptContext(retrying, 1).is_first_attempt)
        self.assertFalse(RetryAttemptContext(retrying, 2).is_last_attempt)
        self.assertTrue(RetryAttemptContext(retrying, 3).is_last_attempt)

    def test_perturbation_grows_linearly(self):
        retrying = Retrying(max_attempts=4, perturbation_step=0.25)
        self.assertEqual([RetryAttemptContext(retrying, n).perturbation for n in (1, 2, 4)], [0.0, 0.25, 0.75])

    def test_is_frozen(self):
        attempt = RetryAttemptContext(Retrying(max_attempts=2), 1)
        with self.assertRaises(AttributeError):
            attempt.attempt_number = 2  # type: ignore

    def test_rejects_attempt_number_out_of_range(self):
        with self.assertRaises(AssertionError):
            RetryAttemptContext(Retrying(max_attempts=2), 3)


class TestRetrying(unittest.TestCase):
    """Tests for the Retrying loop."""

    def test_success_on_first_attempt(self):
        calls = 0
        for attempt in Retrying(max_attempts=3):
            with attempt:
                calls += 1
                break
        self.assertEqual(calls, 1)

    def test_retries_with_a_perturbed_input(self):
        """Should re-attempt a RetryableError and hand each attempt a larger perturbation."""
        shifts = []
        for attempt in Retrying(max_attempts=5, perturbation_step=1e-3, logger_prefix="Contour"):
            with attempt:
                shifts.append(attempt.perturbation)
                if len(shifts) < 3:
                    raise ContourError("winding number not close to an integer")
                break
        self.assertEqual(len(shifts), 3)
        self.assertEqual(shifts[0], 0.0)
        self.assertAlmostEqual(shifts[2], 2e-3)

    def test_previous_errors_are_visible(self):
        seen = []
        for attempt in Retrying(max_attempts=3):
            with attempt:
                seen.append(len(attempt.previous_errors))
                if attempt.attempt_number < 3:
                    raise ContourError(f"attempt {attempt.attempt_number}")
                break
        self.assertEqual(seen, [0, 1, 2])

    def test_raises_max_retries_exceeded_when_exhausted(self):
        calls = 0
        with self.assertRaises(MaxRetriesExceededError) as ctx:
            for attempt in Retrying(max_attempts=3):
                with attempt:
                    calls += 1
                    raise ContourError(f"attempt {calls}")
        self.assertEqual(calls, 3)
        self.assertIsInstance(ctx.exception.last_exception, ContourError)
        self.assertEqual(len(ctx.exception.errors), 3)
        self.assertIn("attempt 3", str(ctx.exception))

    def test_single_attempt_is_still_wrapped(self):
        """Should raise MaxRetriesExceededError also when only one attempt is allowed."""
        with self.assertRaises(MaxRetriesExceededError):
            for attempt in Retrying(max_attempts=1):
                with attempt:
                    raise ContourError("once")

    def test_does_not_retry_other_numerical_errors(self):
        calls = 0
        with self.assertRaises(NotInSpectrumError):
            for attempt in Retrying(max_attempts=3):
                with attempt:
                    calls += 1
                    raise NotInSpectrumError("k is not an eigenvalue")
        self.assertEqual(calls, 1)

    def test_retry_on_configured_exception(self):
        calls = 0
        for attempt in Retrying(max_attempts=3, retry_on_exceptions=(ArithmeticError,)):
            with attempt:
                calls += 1
                if calls < 2:
                    raise ZeroDivisionError("singular step")
                break
        self.assertEqual(calls, 2)

    def test_loop_can_be_reused(self):
        retrying = Retrying(max_attempts=2)
        for _ in range(2):
            for attempt in retrying:
                with attempt:
                    if attempt.is_first_attempt:
                        raise ContourError("first")
                    break
            self.assertEqual(len(retrying.errors), 1)

    def test_rejects_bad_arguments(self):
        with self.assertRaises(ValueError):
            Retrying(max_attempts=0)
        with self.assertRaises(ValueError):
            Retrying(perturbation_step=-1.0)

    def test_contour_error_is_retryable(self):
        self.assertTrue(issubclass(ContourError, RetryableError))
        self.assertFalse(issubclass(NotInSpectrumError, RetryableError))


if __name__ == "__main__":
    unittest.main()
