pub mod compare;
pub mod estimate;
pub mod ingest;
pub mod normality;
pub mod rank;
pub mod simulate;
