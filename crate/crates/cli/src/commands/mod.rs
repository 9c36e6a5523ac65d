// SPDX-License-Identifier: Apache-2.0

pub mod collapse;
pub mod kink;
pub mod simulate;
pub mod stringmap;
pub mod sweep;
