"""HTTP classification API with optional moderator webhook alerts.

Endpoints (JSON, UTF-8):

* ``POST /v1/classify`` -- ``{"text": str}``
* ``POST /v1/classify/batch`` -- ``{"texts": [str, ...]}`` (1 to 256 items)
* ``GET /v1/health``

Labels are reported as ``"suicidal"`` / ``"non_suicidal"``; internally these
are classes 1 and 0.
"""

from __future__ import annotations

import datetime as _dt
import hashlib
import logging
import os
import secrets
import threading
from concurrent.futures import ThreadPoolExecutor
from contextlib import asynccontextmanager
from dataclasses import dataclass, fields, replace
from pathlib import Path

import httpx
import yaml
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from starlette.concurrency import run_in_threadpool

from .exceptions import ContractError, EmptyTextError
from .model import LABEL_NAMES, Prediction, load_model, predict_batch

logger = logging.getLogger(__name__)

MAX_BATCH = 256

ENV_VARS = {
    "SENTINEL_PORT": "port",
    "SENTINEL_MODEL_PATH": "model_path",
    "SENTINEL_PREPROCESS": "preprocess",
    "SENTINEL_THRESHOLD": "decision_threshold",
    "SENTINEL_WEBHOOK_URL": "webhook_url",
}


def _as_bool(v) -> bool:
    if isinstance(v, bool):
        return v
    return str(v).strip().lower() in ("1", "true", "yes", "on")


@dataclass(frozen=True)
class ServiceConfig:
    port: int = 8000
    model_path: str | None = None
    preprocess: bool = True
    decision_threshold: float = 0.5
    webhook_url: str | None = None
    webhook_min_confidence: float = 0.9
    max_request_chars: int = 20_000
    webhook_salt: str | None = None

    def __post_init__(self):
        for name in ("decision_threshold", "webhook_min_confidence"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ContractError(f"{name} must be in (0, 1), got {v}")

    @classmethod
    def load(cls, path=None, env=None) -> "ServiceConfig":
        """Build from an optional YAML file, then apply ``SENTINEL_*`` overrides."""
        env = os.environ if env is None else env
        values = {}
        if path:
            data = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
            known = {f.name for f in fields(cls)}
            unknown = set(data) - known
            if unknown:
                raise ContractError(f"unknown service settings: {sorted(unknown)}")
            values.update(data)
        for var, name in ENV_VARS.items():
            if env.get(var) not in (None, ""):
                values[name] = env[var]
        casts = {"port": int, "max_request_chars": int, "decision_threshold": float,
                 "webhook_min_confidence": float, "preprocess": _as_bool}
        for name, cast in casts.items():
            if name in values:
                values[name] = cast(values[name])
        return cls(**values)


class WebhookNotifier:
    """Fire-and-forget alert delivery on a worker thread.

    Each alert gets one retry on connection failure. Failures are logged
    and counted; the post text itself never leaves the process, only a
    salted SHA-256 of it.
    """

    def __init__(self, url: str, salt: str | None = None, timeout: float = 5.0, transport=None):
        self.url = url
        self.salt = salt if salt is not None else secrets.token_hex(16)
        self.client = httpx.Client(timeout=timeout, transport=transport)
        self.sent = 0
        self.failures = 0
        self._pool = ThreadPoolExecutor(max_workers=2, thread_name_prefix="webhook")
        self._pending = []
        self._lock = threading.Lock()

    def text_hash(self, text: str) -> str:
        return hashlib.sha256((self.salt + text).encode("utf-8")).hexdigest()

    def payload(self, text: str, confidence: float) -> dict:
        return {
            "text_hash": self.text_hash(text),
            "label": "suicidal",
            "confidence": confidence,
            "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        }

    def notify(self, text: str, confidence: float):
        fut = self._pool.submit(self._deliver, self.payload(text, confidence))
        with self._lock:
            self._pending = [f for f in self._pending if not f.done()] + [fut]
        return fut

    def _deliver(self, payload: dict) -> bool:
        for attempt in (1, 2):
            try:
                resp = self.client.post(self.url, json=payload)
            except httpx.TransportError as exc:
                if attempt == 1:
                    continue
                logger.warning("webhook delivery failed: %s", type(exc).__name__)
                break
            except Exception as exc:
                logger.warning("webhook delivery failed: %s", type(exc).__name__)
                break
            if resp.is_success:
                with self._lock:
                    self.sent += 1
                return True
            logger.warning("webhook answered HTTP %d", resp.status_code)
            break
        with self._lock:
            self.failures += 1
        return False

    def flush(self, timeout: float | None = 10.0) -> None:
        with self._lock:
            pending = list(self._pending)
        for f in pending:
            f.result(timeout=timeout)

    def close(self) -> None:
        self._pool.shutdown(wait=True)
        self.client.close()


class ServiceState:
    def __init__(self, config: ServiceConfig, model=None, notifier: WebhookNotifier | None = None):
        self.config = config
        self.model = None
        self.model_version = None
        self.notifier = notifier
        self.load_error: str | None = None
        self._lock = threading.Lock()
        if model is not None:
            self.swap_model(model)

    def swap_model(self, model) -> None:
        manifest = getattr(model, "manifest_", None) or {}
        version = manifest.get("model_version") or f"unversioned-{id(model):x}"
        with self._lock:
            self.model, self.model_version = model, version

    def snapshot(self):
        with self._lock:
            return self.model, self.model_version

    def load_from_disk(self) -> None:
        try:
            self.swap_model(load_model(self.config.model_path))
            logger.info("model loaded: %s", self.model_version)
        except Exception as exc:
            self.load_error = str(exc)
            logger.error("model load failed: %s", exc)


def _error(status: int, code: str, detail: str = "") -> JSONResponse:
    body = {"error": code}
    if detail:
        body["detail"] = detail
    return JSONResponse(body, status_code=status)


def _check_text(text, limit: int):
    """(status, code) for an invalid text, or None."""
    if not isinstance(text, str) or not text.strip():
        return 400, "empty_text"
    if len(text) > limit:
        return 413, "text_too_long"
    return None


def _result(pred: Prediction, version: str, threshold: float) -> dict:
    p1 = pred.suicidal_probability
    label = 1 if p1 >= threshold else 0
    return {
        "label": LABEL_NAMES[label],
        "confidence": pred.raw_scores[label],
        "model_version": version,
    }


def create_app(config: ServiceConfig | None = None, model=None, *, load_in_background: bool = True,
               webhook_transport=None) -> FastAPI:
    """Build the API.

    With ``model`` given the service is ready immediately; otherwise the
    model at ``config.model_path`` is loaded on a background thread at
    startup and requests get 503 until it is in place.
    """
    config = config or ServiceConfig()
    notifier = None
    if config.webhook_url:
        notifier = WebhookNotifier(config.webhook_url, config.webhook_salt, transport=webhook_transport)
    state = ServiceState(config, model, notifier)

    @asynccontextmanager
    async def lifespan(app):
        if state.model is None and config.model_path:
            if load_in_background:
                threading.Thread(target=state.load_from_disk, daemon=True).start()
            else:
                state.load_from_disk()
        yield
        if notifier:
            notifier.close()

    app = FastAPI(title="sentinel", version="1", lifespan=lifespan)
    app.state.sentinel = state

    def classify_many(texts, model, version):
        preds = predict_batch(model, texts, preprocess=config.preprocess)
        out = []
        for text, pred in zip(texts, preds):
            if isinstance(pred, EmptyTextError):
                out.append(None)
                continue
            res = _result(pred, version, config.decision_threshold)
            out.append(res)
            if notifier and res["label"] == "suicidal" and res["confidence"] >= config.webhook_min_confidence:
                try:
                    notifier.notify(text, res["confidence"])
                except Exception:
                    logger.exception("could not queue webhook alert")
        return out

    async def read_json(request: Request):
        try:
            body = await request.json()
        except Exception:
            return None
        return body if isinstance(body, dict) else None

    @app.post("/v1/classify")
    async def classify(request: Request):
        model, version = state.snapshot()
        if model is None:
            return _error(503, "model_unavailable")
        body = await read_json(request)
        if body is None:
            return _error(400, "invalid_request", "body must be a JSON object")
        text = body.get("text")
        bad = _check_text(text, config.max_request_chars)
        if bad:
            return _error(*bad)
        res = (await run_in_threadpool(classify_many, [text], model, version))[0]
        if res is None:
            return _error(422, "unclassifiable_text", "text is empty after normalization")
        return res

    @app.post("/v1/classify/batch")
    async def classify_batch(request: Request):
        model, version = state.snapshot()
        if model is None:
            return _error(503, "model_unavailable")
        body = await read_json(request)
        texts = body.get("texts") if body else None
        if not isinstance(texts, list):
            return _error(400, "invalid_request", "body must be {\"texts\": [...]}")
        if not texts:
            return _error(400, "empty_batch")
        if len(texts) > MAX_BATCH:
            return _error(413, "batch_too_large", f"at most {MAX_BATCH} texts")
        results: list = [None] * len(texts)
        ok = []
        for i, t in enumerate(texts):
            bad = _check_text(t, config.max_request_chars)
            if bad:
                results[i] = {"error": bad[1]}
            else:
                ok.append(i)
        done = await run_in_threadpool(classify_many, [texts[i] for i in ok], model, version)
        for i, res in zip(ok, done):
            results[i] = res if res is not None else {"error": "unclassifiable_text"}
        return {"results": results}

    @app.get("/v1/health")
    async def health():
        model, version = state.snapshot()
        if model is None:
            body = {"status": "loading" if state.load_error is None else "error"}
            return JSONResponse(body, status_code=503)
        return {"status": "ok", "model_version": version}

    return app


def serve(config: ServiceConfig) -> None:
    import uvicorn

    uvicorn.run(create_app(config), host="0.0.0.0", port=config.port, log_level="info")


def with_overrides(config: ServiceConfig, **kw) -> ServiceConfig:
    return replace(config, **{k: v for k, v in kw.items() if v is not None})
