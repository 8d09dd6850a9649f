use std::collections::BTreeMap;
use std::thread;
use std::time::Duration;

use chrono::{DateTime, SecondsFormat, Utc};
use serde_json::Value;
use thiserror::Error;
use url::Url;

use crate::transport::{Transport, TransportError};
use crate::ThumbnailRecord;

pub const API_KEY_ENV: &str = "YOUTUBE_API_KEY";
pub const DEFAULT_BASE_URL: &str = "https://www.googleapis.com/youtube/v3";
pub const DEFAULT_LIMIT: usize = 300;
const PAGE_SIZE: usize = 50;
const MAX_ATTEMPTS: u32 = 3;

/// Thumbnail variants from largest to smallest.
const THUMBNAIL_VARIANTS: [&str; 5] = ["maxres", "standard", "high", "medium", "default"];

#[derive(Debug, Error)]
pub enum ApiError {
    #[error("environment variable {0} is not set")]
    MissingKey(&'static str),
    #[error("authentication failed (HTTP {status}): {message}")]
    Auth { status: u16, message: String },
    #[error("API quota exhausted: {0}")]
    Quota(String),
    #[error("malformed API response: {0}")]
    Malformed(String),
    #[error("HTTP {status}: {message}")]
    Status { status: u16, message: String },
    #[error(transparent)]
    Transport(#[from] TransportError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VideoHit {
    pub video_id: String,
    pub channel_title: String,
    pub published_at: DateTime<Utc>,
    pub thumbnail_url: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VideoStats {
    pub views: u64,
    pub likes: u64,
    pub comments: u64,
}

pub struct YouTubeClient<'t> {
    transport: &'t dyn Transport,
    api_key: String,
    base_url: String,
    retry_delay: Duration,
}

fn error_message(body: &Value) -> String {
    body.pointer("/error/message")
        .and_then(Value::as_str)
        .unwrap_or("no message")
        .to_string()
}

fn is_quota(body: &Value) -> bool {
    body.pointer("/error/errors")
        .and_then(Value::as_array)
        .into_iter()
        .flatten()
        .filter_map(|e| e.get("reason").and_then(Value::as_str))
        .any(|r| matches!(r, "quotaExceeded" | "dailyLimitExceeded" | "rateLimitExceeded"))
}

fn count_field(stats: &Value, key: &str) -> Result<u64, ApiError> {
    match stats.get(key) {
        // Hidden like or comment counts are simply absent.
        None | Some(Value::Null) => Ok(0),
        Some(Value::String(s)) => s
            .parse()
            .map_err(|_| ApiError::Malformed(format!("{key} is not a count: {s:?}"))),
        Some(Value::Number(n)) => n
            .as_u64()
            .ok_or_else(|| ApiError::Malformed(format!("{key} is not a count: {n}"))),
        Some(other) => Err(ApiError::Malformed(format!("{key} is not a count: {other}"))),
    }
}

impl<'t> YouTubeClient<'t> {
    pub fn new(transport: &'t dyn Transport, api_key: impl Into<String>) -> Self {
        Self {
            transport,
            api_key: api_key.into(),
            base_url: DEFAULT_BASE_URL.into(),
            retry_delay: Duration::from_secs(1),
        }
    }

    /// Reads the API key from [`API_KEY_ENV`].
    pub fn from_env(transport: &'t dyn Transport) -> Result<Self, ApiError> {
        let key = std::env::var(API_KEY_ENV).map_err(|_| ApiError::MissingKey(API_KEY_ENV))?;
        Ok(Self::new(transport, key))
    }

    pub fn with_base_url(mut self, base_url: impl Into<String>) -> Self {
        self.base_url = base_url.into();
        self
    }

    /// Delay before the first retry; doubles for each further attempt.
    pub fn with_retry_delay(mut self, delay: Duration) -> Self {
        self.retry_delay = delay;
        self
    }

    fn endpoint(&self, name: &str, params: &[(&str, &str)]) -> Result<String, ApiError> {
        let base = format!("{}/{}", self.base_url.trim_end_matches('/'), name);
        let mut url = Url::parse(&base).map_err(|e| ApiError::Malformed(format!("bad base URL: {e}")))?;
        url.query_pairs_mut()
            .extend_pairs(params.iter().copied())
            .append_pair("key", &self.api_key);
        Ok(url.into())
    }

    fn get_json(&self, url: &str) -> Result<Value, ApiError> {
        let mut attempt = 0;
        loop {
            attempt += 1;
            let transient = match self.transport.get(url) {
                Ok(resp) if (200..300).contains(&resp.status) => {
                    return serde_json::from_slice(&resp.body).map_err(|e| ApiError::Malformed(e.to_string()));
                }
                Ok(resp) => {
                    let body: Value = serde_json::from_slice(&resp.body).unwrap_or(Value::Null);
                    let message = error_message(&body);
                    match resp.status {
                        403 if is_quota(&body) => return Err(ApiError::Quota(message)),
                        401 | 403 => {
                            return Err(ApiError::Auth {
                                status: resp.status,
                                message,
                            })
                        }
                        s if s >= 500 => ApiError::Status { status: s, message },
                        s => return Err(ApiError::Status { status: s, message }),
                    }
                }
                Err(e) => ApiError::Transport(e),
            };
            if attempt >= MAX_ATTEMPTS {
                return Err(transient);
            }
            log::warn!("request failed ({transient}), retrying");
            thread::sleep(self.retry_delay * 2u32.pow(attempt - 1));
        }
    }

    /// Search results for one channel in relevance order, at most `limit`.
    pub fn search_videos(
        &self,
        query: &str,
        channel_id: &str,
        published_after: Option<DateTime<Utc>>,
        limit: usize,
    ) -> Result<Vec<VideoHit>, ApiError> {
        let after = published_after.map(|t| t.to_rfc3339_opts(SecondsFormat::Secs, true));
        let mut hits = Vec::new();
        let mut page_token: Option<String> = None;
        while hits.len() < limit {
            let page_size = (limit - hits.len()).min(PAGE_SIZE).to_string();
            let mut params = vec![
                ("part", "snippet"),
                ("type", "video"),
                ("order", "relevance"),
                ("q", query),
                ("channelId", channel_id),
                ("maxResults", page_size.as_str()),
            ];
            if let Some(a) = &after {
                params.push(("publishedAfter", a));
            }
            if let Some(t) = &page_token {
                params.push(("pageToken", t));
            }
            let body = self.get_json(&self.endpoint("search", &params)?)?;
            let items = body
                .get("items")
                .and_then(Value::as_array)
                .ok_or_else(|| ApiError::Malformed("search response has no items array".into()))?;
            for item in items {
                if hits.len() == limit {
                    break;
                }
                hits.push(parse_hit(item)?);
            }
            page_token = body.get("nextPageToken").and_then(Value::as_str).map(String::from);
            if page_token.is_none() || items.is_empty() {
                break;
            }
        }
        Ok(hits)
    }

    /// View, like and comment counts, requested in batches of 50 ids.
    pub fn video_stats(&self, ids: &[String]) -> Result<BTreeMap<String, VideoStats>, ApiError> {
        let mut out = BTreeMap::new();
        for chunk in ids.chunks(PAGE_SIZE) {
            let joined = chunk.join(",");
            let url = self.endpoint("videos", &[("part", "statistics"), ("id", &joined)])?;
            let body = self.get_json(&url)?;
            let items = body
                .get("items")
                .and_then(Value::as_array)
                .ok_or_else(|| ApiError::Malformed("videos response has no items array".into()))?;
            for item in items {
                let id = item
                    .get("id")
                    .and_then(Value::as_str)
                    .ok_or_else(|| ApiError::Malformed("video without id".into()))?;
                let stats = item
                    .get("statistics")
                    .ok_or_else(|| ApiError::Malformed(format!("video {id} has no statistics")))?;
                out.insert(
                    id.to_string(),
                    VideoStats {
                        views: count_field(stats, "viewCount")?,
                        likes: count_field(stats, "likeCount")?,
                        comments: count_field(stats, "commentCount")?,
                    },
                );
            }
        }
        Ok(out)
    }

    /// Search plus statistics, as manifest records without local files.
    /// Videos whose statistics are unavailable are dropped with a warning.
    pub fn collect_records(
        &self,
        event: &str,
        channel_id: &str,
        group: &str,
        published_after: Option<DateTime<Utc>>,
        limit: usize,
    ) -> Result<Vec<ThumbnailRecord>, ApiError> {
        let hits = self.search_videos(event, channel_id, published_after, limit)?;
        let ids: Vec<String> = hits.iter().map(|h| h.video_id.clone()).collect();
        let stats = self.video_stats(&ids)?;
        let mut records = Vec::with_capacity(hits.len());
        for hit in hits {
            let Some(s) = stats.get(&hit.video_id) else {
                log::warn!("no statistics for video {}, skipped", hit.video_id);
                continue;
            };
            records.push(ThumbnailRecord {
                image_id: hit.video_id,
                channel: hit.channel_title,
                group: group.to_string(),
                event: event.to_string(),
                published_at: hit.published_at,
                views: s.views,
                likes: s.likes,
                comments: s.comments,
                thumbnail_path: None,
                url: hit.thumbnail_url,
            });
        }
        Ok(records)
    }
}

fn parse_hit(item: &Value) -> Result<VideoHit, ApiError> {
    let field = |ptr: &str| {
        item.pointer(ptr)
            .and_then(Value::as_str)
            .ok_or_else(|| ApiError::Malformed(format!("search item lacks {ptr}")))
    };
    let video_id = field("/id/videoId")?.to_string();
    let published_at = field("/snippet/publishedAt")?
        .parse()
        .map_err(|e| ApiError::Malformed(format!("bad publishedAt for {video_id}: {e}")))?;
    let thumbs = item
        .pointer("/snippet/thumbnails")
        .ok_or_else(|| ApiError::Malformed(format!("no thumbnails for {video_id}")))?;
    let thumbnail_url = THUMBNAIL_VARIANTS
        .iter()
        .find_map(|v| thumbs.get(v).and_then(|t| t.get("url")).and_then(Value::as_str))
        .ok_or_else(|| ApiError::Malformed(format!("no thumbnail URL for {video_id}")))?
        .to_string();
    Ok(VideoHit {
        video_id,
        channel_title: field("/snippet/channelTitle").unwrap_or("").to_string(),
        published_at,
        thumbnail_url,
    })
}
