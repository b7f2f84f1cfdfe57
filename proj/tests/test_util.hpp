//
// Copyright 2026 The mmbound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef MMBOUND_TESTS_TEST_UTIL_HPP_
#define MMBOUND_TESTS_TEST_UTIL_HPP_

#include <string>

#include <gtest/gtest.h>

#include "mmbound/error.hpp"

namespace mmbound::testing {

// Succeeds when f throws mmbound::Error with the given code.
template <typename F>
::testing::AssertionResult ThrowsCode(F&& f, ErrorCode code) {
  try {
    f();
  } catch (const Error& e) {
    if (e.code() == code) return ::testing::AssertionSuccess();
    return ::testing::AssertionFailure() << "threw " << e.name() << " instead of " << ErrorName(code);
  } catch (const std::exception& e) {
    return ::testing::AssertionFailure() << "threw foreign exception: " << e.what();
  }
  return ::testing::AssertionFailure() << "did not throw " << ErrorName(code);
}

}  // namespace mmbound::testing

#define EXPECT_MM_ERROR(expr, code) EXPECT_TRUE(::mmbound::testing::ThrowsCode([&] { (void)(expr); }, code))

#endif  // MMBOUND_TESTS_TEST_UTIL_HPP_
