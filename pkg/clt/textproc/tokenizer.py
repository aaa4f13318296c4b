import re
from typing import List

# A word is a run of letters/digits/underscore; every other non-space character stands alone
_TOKEN_RE = re.compile(r"\w+|[^\w\s]", re.UNICODE)


def tokenize(raw: str) -> List[str]:
    """
    Lowercase, split punctuation into standalone tokens, split on whitespace.

    Empty or whitespace-only input yields an empty list; callers decide whether
    to drop such texts.
    """
    if not raw:
        return []
    return _TOKEN_RE.findall(raw.lower())
