/*
 * Copyright 2026 The bgan Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef BGAN_ERROR_HPP
#define BGAN_ERROR_HPP

#include <stdexcept>
#include <string>

namespace bgan {

class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Incompatible tensor or batch shapes.
class ShapeError : public Error
{
public:
  using Error::Error;
};

// NaN or Inf produced by an operation or passed to an optimizer.
class NonFiniteError : public Error
{
public:
  using Error::Error;
};

// Argument outside the declared domain of a function (e.g. a conjugate).
class DomainError : public Error
{
public:
  using Error::Error;
};

// Malformed file contents (IDX, checkpoints, datasets).
class FormatError : public Error
{
public:
  using Error::Error;
};

// Invalid configuration value; the message names the offending field.
class ConfigError : public Error
{
public:
  using Error::Error;
};

// Computation exceeds an explicit size budget.
class BudgetError : public Error
{
public:
  using Error::Error;
};

} // namespace bgan

#endif // BGAN_ERROR_HPP
