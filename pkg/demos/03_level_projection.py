"""Projecting labels between the entity, word and token levels.

Datasets live on the entity or word level, model training on the token
level, evaluation on the entity level. The projections here connect
them: character entities onto words, word labels onto subword tokens
(masked or full), and token labels back to words.
"""

from seqlab import (
    AnnotationScheme,
    Document,
    EntitySpan,
    TokenAlignment,
    Word,
    entities_to_word_labels,
    token_labels_to_word_labels,
    word_labels_to_token_labels,
)

BIO = AnnotationScheme.BIO

# =============================================================================
# Entities -> word labels (boundaries must sit on word boundaries)
# =============================================================================

doc = Document(
    "The United Nations",
    words=(Word("The", 0, 3), Word("United", 4, 10), Word("Nations", 11, 18)),
    entities=(EntitySpan("ORG", 4, 18, "United Nations"),),
)
word_labels = entities_to_word_labels(doc, BIO)
print(f"entity [4, 18) ORG -> {word_labels.serialized()}")

# =============================================================================
# Word labels -> token labels
# =============================================================================

# pretend a subword tokenizer split the three words into 1, 3 and 2 pieces
alignment = TokenAlignment.from_token_counts([1, 3, 2])

masked = word_labels_to_token_labels(word_labels, alignment, "word_level_masked")
print("\nmasked (continuations are ignored in the loss):")
print([lab if isinstance(lab, int) else lab.serialize() for lab in masked])

full = word_labels_to_token_labels(word_labels, alignment, "token_level_full")
print("full (continuations get real chunk-continuation labels):")
print([lab.serialize() for lab in full])

# =============================================================================
# Token labels -> word labels: each word takes its first token's label
# =============================================================================

back = token_labels_to_word_labels(full, alignment, BIO)
print(f"\nback to words: {back.serialized()}")
assert back.serialized() == word_labels.serialized()
