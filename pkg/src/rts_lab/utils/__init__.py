"""Utility functions package."""

from rts_lab.utils.file_storage import load_file, save_file
from rts_lab.utils.hamiltonian_file import load_hamiltonian, parse_hamiltonian_text

__all__ = ["load_file", "save_file", "load_hamiltonian", "parse_hamiltonian_text"]
