//! Achievable rate regions for two-receiver discrete memoryless broadcast
//! channels with rate-limited feedback.

pub mod examples;
pub mod fme;
pub mod geometry;
pub mod info;
pub mod regions;
pub mod search;
