"""Refreshes the stem column of porter_oracle.tsv with NLTK's Porter implementation."""
from nltk.stem.porter import PorterStemmer

from textlib import ROOT

stemmer = PorterStemmer(mode=PorterStemmer.MARTIN_EXTENSIONS)
path = ROOT / "tests/data/porter_oracle.tsv"
words = [line.split("\t")[0] for line in path.read_text().splitlines() if line]
path.write_text("".join(f"{w}\t{stemmer.stem(w)}\n" for w in words))
print(len(words), "words")
