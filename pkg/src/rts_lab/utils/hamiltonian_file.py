"""Text format for Pauli-sum Hamiltonians: one ``<coefficient> <pauli word>`` per line."""

import math
from pathlib import Path

from pydantic import ValidationError

from rts_lab.schemas.bccks import PauliSumHamiltonian, PauliTerm
from rts_lab.utils.file_storage import load_file


class HamiltonianFileError(ValueError):
    """Raised when a Hamiltonian file cannot be parsed."""


def parse_hamiltonian_text(text: str) -> PauliSumHamiltonian:
    """
    Parse Hamiltonian text.

    Blank lines and lines starting with ``#`` are ignored; trailing ``#``
    comments are stripped. Negative coefficients keep their sign on the term.

    Args:
        text: File contents

    Returns:
        PauliSumHamiltonian

    Raises:
        HamiltonianFileError: On malformed lines or inconsistent word lengths

    Examples:
        >>> h = parse_hamiltonian_text("1.0 XXI\\n-0.5 IZZ\\n")
        >>> h.alpha_sum
        1.5
    """
    terms: list[PauliTerm] = []
    width: int | None = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise HamiltonianFileError(f"line {number}: expected '<coefficient> <pauli word>'")
        try:
            value = float(parts[0])
        except ValueError as exc:
            raise HamiltonianFileError(f"line {number}: bad coefficient {parts[0]!r}") from exc
        if not math.isfinite(value):
            raise HamiltonianFileError(f"line {number}: coefficient must be finite")
        word = parts[1].upper()
        if width is None:
            width = len(word)
        elif len(word) != width:
            raise HamiltonianFileError(
                f"line {number}: word {word!r} has {len(word)} sites, expected {width}"
            )
        try:
            terms.append(
                PauliTerm(coefficient=abs(value), pauli=word, sign=-1 if value < 0 else 1)
            )
        except ValidationError as exc:
            raise HamiltonianFileError(f"line {number}: invalid pauli word {word!r}") from exc
    if not terms:
        raise HamiltonianFileError("hamiltonian file has no terms")
    return PauliSumHamiltonian(terms=terms, n_qubits=width)


def load_hamiltonian(filepath: str | Path) -> PauliSumHamiltonian:
    """Read and parse a Hamiltonian file."""
    return parse_hamiltonian_text(load_file(filepath))
