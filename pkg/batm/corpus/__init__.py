"""Corpus ingestion: reading, tokenization, vocabulary, encoding and splitting."""

from .loader import load_alias_map, load_jsonl
from .pipeline import PreparedCorpus, encode_corpus, prepare_corpus, write_split_manifest
from .splitter import DEFAULT_RATIOS, split, split_sizes
from .tokenizer import Token, is_alphabetic, token_texts, tokenize
from .vocabulary import PAD_TOKEN, UNK_TOKEN, Vocabulary, build_vocabulary, encode
