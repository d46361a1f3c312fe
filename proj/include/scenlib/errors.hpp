// Copyright 2026 The scenlib Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SCENLIB__ERRORS_HPP_
#define SCENLIB__ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace scenlib
{

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// A configuration value violates its documented bound.
class InvalidConfig : public Error
{
public:
  using Error::Error;
};

/// A coordinate or index lies outside the scenario grid.
class OutOfBounds : public Error
{
public:
  OutOfBounds(const std::string & what, std::size_t dimension)
  : Error(what), dimension_(dimension)
  {
  }

  std::size_t dimension() const noexcept { return dimension_; }

private:
  std::size_t dimension_;
};

/// Two inputs that must share a grid do not.
class GridMismatch : public Error
{
public:
  using Error::Error;
};

/// Input data is empty or unusable (no samples, empty zone, empty library).
class EmptyInput : public Error
{
public:
  using Error::Error;
};

/// A sampled or weighted cell has zero importance mass where the target is positive.
class SupportViolation : public Error
{
public:
  using Error::Error;
};

/// A numeric argument is outside its domain.
class DomainError : public Error
{
public:
  using Error::Error;
};

}  // namespace scenlib

#endif  // SCENLIB__ERRORS_HPP_
