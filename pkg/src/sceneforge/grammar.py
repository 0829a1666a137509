"""Dense caption composition from frame metadata.

Captions are built from five fixed sentence templates, in a fixed order:

  1. prefix_enumeration: "This scene contains a <np>, an <np>, ..., and k humans."
  2. scene:              "They are in a/an <environment description>."
  3. relation (shuffled): "<X> is to the left of <Y>." / "... is to the right
     of ..." / "... is in front of ..." / "... is behind ..."
  4. action, per human:  "The <ordinal> person <action phrase>."
  5. clothing, per human: "The <ordinal> person <annotation>."

Noun phrases order adjectives size, color, material before the noun and omit
attributes stored as null in the metadata. Relation sentences name objects
with indefinite articles and humans as "the <ordinal> person". In sampled
mode each relation/clothing sentence survives an independent keep-draw with
probability min(1, weight of its category); the enumeration, scene, and
action sentences are always kept. The shuffle and the keep-draws consume the
caller's stream in statement order, so a stored seed replays a caption
exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import DEFAULT_STATEMENT_WEIGHTS
from .metadata import FrameMetadata, MetaHuman, MetaObject
from .relations import IN_FRONT_OF, LEFT_OF
from .rng import Stream

CAPTION_PREFIX = "This scene contains"
PARAPHRASE_PREFIX = "Please describe a scene containing"
PARAPHRASE_SUFFIX = "In this scene, we can see"
PARAPHRASE_TOKEN_BUDGET = 150

ORDINAL_WORDS = ("first", "second", "third", "fourth")

STATEMENT_CATEGORIES = ("prefix_enumeration", "scene", "relation", "action", "clothing")


class GrammarError(Exception):
    pass


@dataclass(frozen=True)
class CaptionDoc:
    statements: tuple[tuple[str, str], ...]  # (category, sentence)
    full_text: str

    def validate(self) -> None:
        if self.full_text != " ".join(s for _, s in self.statements):
            raise GrammarError("full_text is not the space-joined statements")
        for cat, sentence in self.statements:
            if cat not in STATEMENT_CATEGORIES:
                raise GrammarError(f"unknown statement category '{cat}'")
            if not sentence or not sentence.endswith(".") or sentence.endswith(".."):
                raise GrammarError(f"sentence must end with '.' exactly once: {sentence!r}")


@dataclass(frozen=True)
class ParaphrasePrompt:
    text: str
    max_new_tokens: int = PARAPHRASE_TOKEN_BUDGET


def indefinite_article(phrase: str) -> str:
    """'an' when the phrase starts with a vowel letter, else 'a'."""
    if not phrase:
        raise GrammarError("empty phrase has no article")
    return "an" if phrase[0].lower() in "aeiou" else "a"


def ordinal(n: int) -> str:
    if not 1 <= n <= len(ORDINAL_WORDS):
        raise GrammarError(f"ordinal {n} out of range [1, {len(ORDINAL_WORDS)}]")
    return ORDINAL_WORDS[n - 1]


def object_noun_phrase(obj: MetaObject) -> str:
    """'<size> <color> <material> <noun>', skipping null attributes."""
    words = [w for w in (obj.size, obj.color, obj.material) if w]
    return " ".join(words + [obj.noun])


def _object_ref(obj: MetaObject) -> str:
    phrase = object_noun_phrase(obj)
    return f"{indefinite_article(phrase)} {phrase}"


def _human_ref(hum: MetaHuman) -> str:
    return f"the {ordinal(hum.ordinal)} person"


def _capitalize(sentence: str) -> str:
    return sentence[0].upper() + sentence[1:]


def compose_caption(
    metadata: FrameMetadata,
    stream: Stream,
    mode: str = "full",
    weights: dict[str, float] | None = None,
) -> CaptionDoc:
    """Deterministic caption for one frame record."""
    if mode not in ("full", "sampled"):
        raise GrammarError(f"unknown caption mode '{mode}'")
    merged = dict(DEFAULT_STATEMENT_WEIGHTS)
    merged.update(weights or {})

    def keep(category: str) -> bool:
        if mode == "full":
            return True
        return stream.random() < min(1.0, merged[category])

    statements: list[tuple[str, str]] = []

    enumeration = CAPTION_PREFIX + " "
    for obj in metadata.objects:
        enumeration += f"{_object_ref(obj)}, "
    enumeration += f"and {len(metadata.humans)} humans."
    statements.append(("prefix_enumeration", enumeration))

    desc = metadata.env_description
    statements.append(("scene", f"They are in {indefinite_article(desc)} {desc}."))

    refs: dict[int, str] = {o.instance_id: _object_ref(o) for o in metadata.objects}
    refs.update({h.instance_id: _human_ref(h) for h in metadata.humans})
    present = metadata.relations.as_set()
    entity_ids = [o.instance_id for o in metadata.objects] + [
        h.instance_id for h in metadata.humans
    ]

    relation_sentences: list[str] = []
    for i in range(len(entity_ids)):
        for j in range(i + 1, len(entity_ids)):
            a, b = entity_ids[i], entity_ids[j]
            left = right = None
            if (a, LEFT_OF, b) in present:
                left, right = a, b
            elif (b, LEFT_OF, a) in present:
                left, right = b, a
            if left is not None:
                relation_sentences.append(
                    _capitalize(f"{refs[left]} is to the left of {refs[right]}.")
                )
                relation_sentences.append(
                    _capitalize(f"{refs[right]} is to the right of {refs[left]}.")
                )
            front = back = None
            if (a, IN_FRONT_OF, b) in present:
                front, back = a, b
            elif (b, IN_FRONT_OF, a) in present:
                front, back = b, a
            if front is not None:
                relation_sentences.append(
                    _capitalize(f"{refs[front]} is in front of {refs[back]}.")
                )
                relation_sentences.append(
                    _capitalize(f"{refs[back]} is behind {refs[front]}.")
                )
    stream.shuffle(relation_sentences)
    for sentence in relation_sentences:
        if keep("relation"):
            statements.append(("relation", sentence))

    for hum in metadata.humans:
        statements.append(("action", f"The {ordinal(hum.ordinal)} person {hum.action}."))
        for annotation in hum.clothing_sentences:
            if keep("clothing"):
                statements.append(
                    ("clothing", f"The {ordinal(hum.ordinal)} person {annotation.strip()}.")
                )

    doc = CaptionDoc(
        statements=tuple(statements),
        full_text=" ".join(s for _, s in statements),
    )
    doc.validate()
    return doc


def build_paraphrase_prompt(doc: CaptionDoc) -> ParaphrasePrompt:
    """LLM completion prompt: swapped prefix plus a fixed completion suffix."""
    if not doc.full_text.startswith(CAPTION_PREFIX):
        raise GrammarError(
            f"caption does not start with the required prefix {CAPTION_PREFIX!r}"
        )
    body = doc.full_text[len(CAPTION_PREFIX):]
    return ParaphrasePrompt(text=f"{PARAPHRASE_PREFIX}{body} {PARAPHRASE_SUFFIX}")
