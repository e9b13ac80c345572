"""rcgen: turn raw domain corpora into reading-comprehension training data.

The pipeline mines self-supervised tasks from each document (summaries,
keyword-to-sentence, inference, cause/effect, paraphrase, completion),
renders them through paraphrased templates, appends them to the raw text,
and mixes the result with general instructions at a configured ratio.
"""

__version__ = "0.1.0"
