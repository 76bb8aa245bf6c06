"""Automated quality grading of online health articles.

Scores articles as Satisfactory / Not Satisfactory on ten editorial
quality criteria using a classic text-mining pipeline.
"""

__version__ = "0.1.0"

CRITERIA = tuple(range(1, 11))
