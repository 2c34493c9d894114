"""Real model backends, loaded lazily and at most once per identifier.

Only imported paths touch the ML stack, so stub-mode deployments never need
transformers installed. Device selection comes from the
``LEXSIMP_SIDECAR_DEVICE`` environment variable (default cpu); the usual
Hugging Face cache variables control where weights land.
"""

from __future__ import annotations

import os


def _device() -> str:
    return os.environ.get("LEXSIMP_SIDECAR_DEVICE", "cpu")


class ModelLoadError(RuntimeError):
    pass


def _is_whole_word(token: str) -> bool:
    token = token.strip()
    return bool(token) and "##" not in token and not token.startswith("▁") \
        and any(ch.isalnum() for ch in token)


class RealFillMask:
    def __init__(self, model: str):
        self.model = model
        try:
            from transformers import pipeline
            self._pipe = pipeline("fill-mask", model=model, device=_device())
        except Exception as err:
            raise ModelLoadError(f"cannot load fill-mask model {model!r}: {err}")
        self._mask_token = self._pipe.tokenizer.mask_token
        self._sep_token = self._pipe.tokenizer.sep_token or "</s>"

    def fill_mask(self, text: str, k: int) -> list[tuple[str, float]]:
        # Queries arrive in `[MASK]`/`</s>` notation; translate to whatever
        # special tokens the loaded tokenizer actually uses.
        query = text.replace("[MASK]", self._mask_token)
        query = query.replace("</s>", self._sep_token)
        raw = self._pipe(query, top_k=max(2 * k, k + 5))
        results = []
        for entry in raw:
            token = str(entry["token_str"]).strip()
            if not _is_whole_word(token):
                continue
            results.append((token, float(entry["score"])))
            if len(results) == k:
                break
        return results


class RealEmbedder:
    def __init__(self, model: str):
        self.model = model
        try:
            from sentence_transformers import SentenceTransformer
            self._model = SentenceTransformer(model, device=_device())
        except Exception as err:
            raise ModelLoadError(f"cannot load embedding model {model!r}: {err}")

    def embed(self, sentence: str) -> list[float]:
        vector = self._model.encode([sentence], convert_to_numpy=True,
                                    show_progress_bar=False)[0]
        return [float(x) for x in vector]


class RealGenerator:
    def __init__(self, model: str):
        self.model = model
        try:
            from transformers import AutoModelForSeq2SeqLM, AutoTokenizer
            self._tokenizer = AutoTokenizer.from_pretrained(model)
            self._model = AutoModelForSeq2SeqLM.from_pretrained(model)
            self._model.to(_device())
            self._model.eval()
        except Exception as err:
            raise ModelLoadError(f"cannot load seq2seq model {model!r}: {err}")

    def generate(self, source: str, beam_width: int,
                 max_candidates: int) -> list[tuple[str, float]]:
        import torch

        count = max(1, min(beam_width, max_candidates))
        inputs = self._tokenizer(source, return_tensors="pt",
                                 truncation=True).to(_device())
        with torch.no_grad():
            output = self._model.generate(
                **inputs, num_beams=beam_width, num_return_sequences=count,
                do_sample=False, output_scores=True,
                return_dict_in_generate=True, max_new_tokens=16)
        texts = self._tokenizer.batch_decode(output.sequences,
                                             skip_special_tokens=True)
        scores = getattr(output, "sequences_scores", None)
        results = []
        for i, text in enumerate(texts):
            score = float(scores[i]) if scores is not None else -float(i)
            results.append((text.strip(), score))
        results.sort(key=lambda pair: -pair[1])
        return results
