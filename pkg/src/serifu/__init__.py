"""Speaker stylometry toolkit.

Learns one unigram subword vocabulary per speaker, extracts
group-characterizing speech patterns via TF/IDF, and classifies speakers
into demographic groups. Ships a FastAPI service plus a thin CLI client.
"""

__version__ = "0.1.0"
