#![no_std]
#![doc = include_str!("../README.md")]

extern crate alloc;

pub mod congruence;
pub mod dataset;
pub mod exact;
pub mod forms;
pub mod lfunc;
pub mod mp;
pub mod resolve;
pub mod rootdata;
