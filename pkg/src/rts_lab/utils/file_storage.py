"""File helpers for reading model files and writing run reports."""

import os
import tempfile
from pathlib import Path


def resolve_path(filepath: str | Path) -> Path:
    """
    Resolve a file path to an absolute path.

    Relative paths are taken against the current working directory and a
    leading ``~`` is expanded.

    Args:
        filepath: An absolute or relative path.

    Returns:
        Absolute path.
    """
    return Path(filepath).expanduser().resolve()


def load_file(filepath: str | Path) -> str:
    """
    Load UTF-8 text from a file.

    Args:
        filepath: The path to the file to load.

    Returns:
        The file content as a string.

    Raises:
        FileNotFoundError: If the file doesn't exist.
        OSError: If the file cannot be read.

    Examples:
        >>> text = load_file("models/ising3.txt")
    """
    with open(resolve_path(filepath), encoding="utf-8") as f:
        return f.read()


def save_file(content: str, filepath: str | Path) -> Path:
    """
    Write a file atomically, creating parent directories if needed.

    The content goes to a temporary file in the destination directory which
    then replaces the target, so readers never see a partial report.

    Args:
        content: The content to save.
        filepath: The destination path.

    Returns:
        The absolute path where the file was saved.

    Raises:
        OSError: If the file cannot be written.

    Examples:
        >>> save_file(report.to_json(), "runs/table.json")
    """
    resolved = resolve_path(filepath)
    resolved.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=resolved.parent, prefix=f".{resolved.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            f.write(content)
        os.replace(tmp_name, resolved)
    except BaseException:
        Path(tmp_name).unlink(missing_ok=True)
        raise
    return resolved
