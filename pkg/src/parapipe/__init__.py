"""parapipe: parallel paragraph extraction and translation evaluation.

The package has two halves:

* an extraction pipeline that turns aligned web document pairs plus
  automatic sentence alignments into clean parallel paragraphs
  (ingest -> segmentation -> extraction -> cleaning -> corpus tools), and
* an evaluation harness for translation output (corpus BLEU, paired
  bootstrap significance, contrastive pronoun accuracy).

Everything is deterministic: given the same inputs, flags and seeds, every
entry point produces byte-identical output regardless of worker count.
"""

__version__ = "0.1.0"

# Version of the on-disk formats (paragraph-pair JSONL, manifest, profiles).
FORMAT_VERSION = "1"
