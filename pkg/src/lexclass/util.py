"""Small shared helpers: number formatting and atomic file output."""

import os
import tempfile


def fmt17(x: float) -> str:
    """Render a float with 17 significant digits (lossless for binary64)."""
    return format(float(x), ".17g")


def fmt4(x: float) -> str:
    """Render a probability with the 4 decimals used in human-readable reports."""
    return format(float(x), ".4f")


def atomic_write(path, text: str) -> None:
    """Write ``text`` to ``path`` via a temp file + rename in the same directory.

    Output is UTF-8 with LF line endings regardless of platform.
    """
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=os.path.basename(path) + ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise
