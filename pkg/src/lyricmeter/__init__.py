"""lyricmeter: time signature determination (3/4 vs 4/4) from lyrics text."""

__version__ = "0.1.0"
