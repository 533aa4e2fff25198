// Copyright 2026 The spinloc Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates a mathematical precondition.
    #[error("domain error: {0}")]
    Domain(String),
    /// A model or experiment configuration is invalid.
    #[error("configuration error: {0}")]
    Config(String),
    /// A local dimension other than the supported one was supplied.
    #[error("unsupported local dimension: {0}")]
    UnsupportedDimension(String),
    /// A size cap was exceeded.
    #[error("resource cap exceeded: {0}")]
    Resource(String),
    /// A numerical kernel failed.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// Not enough samples to evaluate a quantity.
    #[error("insufficient resolution: {0}")]
    Resolution(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn config<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}
