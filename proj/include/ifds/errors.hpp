// Copyright (c) ifdsq contributors.
// SPDX-License-Identifier: MIT
#pragma once

#include <stdexcept>
#include <string>

namespace ifds {

// Base class for all library failures. Subtypes exist so callers (the CLI in
// particular) can map a failure to an exit code without matching strings.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input document (bad JSON, wrong shape).
struct ParseError : Error {
  using Error::Error;
};

// Well-formed document that violates an arena invariant. Messages carry the
// offending location ("function 'main', edge 1->2: ...").
struct ValidationError : Error {
  using Error::Error;
};

// Relation or fact index used against a mismatched fact domain.
struct DomainMismatch : Error {
  using Error::Error;
};

// Vertex or fact identifier outside the arena it is used with.
struct UnknownVertex : Error {
  using Error::Error;
};

// Tree decomposition does not cover the graph it is paired with.
struct DecompositionMismatch : Error {
  using Error::Error;
};

// LCA query across distinct trees of a forest.
struct DifferentTrees : Error {
  using Error::Error;
};

// Serialized index carries an unsupported format version or bad magic.
struct VersionMismatch : Error {
  using Error::Error;
};

// Serialized index does not belong to the arena it is checked against, or
// its embedded arena no longer matches the stored fingerprint.
struct FingerprintMismatch : Error {
  using Error::Error;
};

// Serialized index is truncated or fails a section checksum.
struct CorruptIndex : Error {
  using Error::Error;
};

// Query index used with an arena other than the one it was built from.
struct IndexMismatch : Error {
  using Error::Error;
};

// Bounded oracle search gave up before it could prove absence. Surfaced so
// the oracle is never silently wrong on recursive arenas.
struct BoundExceeded : Error {
  using Error::Error;
};

// Generator parameters that cannot be satisfied.
struct InfeasibleSpec : Error {
  using Error::Error;
};

// Two benchmark engines answered the same query differently.
struct EngineDisagreement : Error {
  using Error::Error;
};

// Operating-system level I/O failure (unreadable/unwritable file).
struct IoError : Error {
  using Error::Error;
};

} // namespace ifds
