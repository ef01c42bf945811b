use std::env;
use std::net::SocketAddr;
use std::path::PathBuf;

use serde::Deserialize;

use crate::ServerError;

pub const DEFAULT_MAX_SNAPSHOT_BYTES: usize = 16 * 1024 * 1024;

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServerConfig {
    pub bind_address: SocketAddr,
    pub storage_dir: PathBuf,
    pub max_snapshot_bytes: usize,
    /// When set, `POST` requires `Authorization: Bearer <token>`.
    pub write_token: Option<String>,
    /// `["*"]` allows any origin.
    pub cors_allowed_origins: Vec<String>,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig {
            bind_address: SocketAddr::from(([127, 0, 0, 1], 8080)),
            storage_dir: PathBuf::from("snapshots"),
            max_snapshot_bytes: DEFAULT_MAX_SNAPSHOT_BYTES,
            write_token: None,
            cors_allowed_origins: vec!["*".into()],
        }
    }
}

impl ServerConfig {
    /// Parse a TOML file body. Missing keys take their defaults.
    pub fn from_toml(text: &str) -> Result<Self, ServerError> {
        let config: ServerConfig =
            toml::from_str(text).map_err(|e| ServerError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Overlay `NODEGLASS_BIND`, `NODEGLASS_STORAGE_DIR`,
    /// `NODEGLASS_MAX_SNAPSHOT_BYTES`, `NODEGLASS_WRITE_TOKEN` and
    /// `NODEGLASS_CORS_ORIGINS` (comma separated) on top of `self`.
    pub fn with_env(self) -> Result<Self, ServerError> {
        self.with_vars(|key| env::var(key).ok())
    }

    fn with_vars(mut self, var: impl Fn(&str) -> Option<String>) -> Result<Self, ServerError> {
        let bad = |key: &str, value: &str| ServerError::Config(format!("{key}={value} is invalid"));
        if let Some(v) = var("NODEGLASS_BIND") {
            self.bind_address = v.parse().map_err(|_| bad("NODEGLASS_BIND", &v))?;
        }
        if let Some(v) = var("NODEGLASS_STORAGE_DIR") {
            self.storage_dir = v.into();
        }
        if let Some(v) = var("NODEGLASS_MAX_SNAPSHOT_BYTES") {
            self.max_snapshot_bytes = v
                .parse()
                .map_err(|_| bad("NODEGLASS_MAX_SNAPSHOT_BYTES", &v))?;
        }
        if let Some(v) = var("NODEGLASS_WRITE_TOKEN") {
            self.write_token = Some(v).filter(|t| !t.is_empty());
        }
        if let Some(v) = var("NODEGLASS_CORS_ORIGINS") {
            self.cors_allowed_origins = v
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_owned)
                .collect();
        }
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), ServerError> {
        if self.max_snapshot_bytes == 0 {
            return Err(ServerError::Config("max_snapshot_bytes must be positive".into()));
        }
        if self.write_token.as_deref() == Some("") {
            return Err(ServerError::Config("write_token must not be empty".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn toml_with_defaults() {
        let c = ServerConfig::from_toml("storage_dir = \"/tmp/x\"\nwrite_token = \"s3cret\"\n").unwrap();
        assert_eq!(c.storage_dir, PathBuf::from("/tmp/x"));
        assert_eq!(c.write_token.as_deref(), Some("s3cret"));
        assert_eq!(c.max_snapshot_bytes, DEFAULT_MAX_SNAPSHOT_BYTES);
        assert!(ServerConfig::from_toml("max_snapshot_bytes = 0").is_err());
        assert!(ServerConfig::from_toml("colour = 1").is_err());
    }

    #[test]
    fn env_overlay() {
        let vars: HashMap<&str, &str> = [
            ("NODEGLASS_BIND", "0.0.0.0:9000"),
            ("NODEGLASS_MAX_SNAPSHOT_BYTES", "1024"),
            ("NODEGLASS_CORS_ORIGINS", "https://a.example, https://b.example"),
        ]
        .into();
        let c = ServerConfig::default()
            .with_vars(|k| vars.get(k).map(|v| v.to_string()))
            .unwrap();
        assert_eq!(c.bind_address.port(), 9000);
        assert_eq!(c.max_snapshot_bytes, 1024);
        assert_eq!(c.cors_allowed_origins, ["https://a.example", "https://b.example"]);

        let bad = ServerConfig::default().with_vars(|k| (k == "NODEGLASS_BIND").then(|| "nope".into()));
        assert!(bad.is_err());
    }
}
